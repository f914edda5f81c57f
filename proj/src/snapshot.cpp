#include "kgex/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace kgex {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'E', 'X', 'S', 'N', 'P', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error("snapshot: truncated file");
}

}  // namespace

struct SnapshotCodec {
    static void save(std::ostream& out, const EmbeddingModel& model, const Calibrator* calibrator) {
        out.write(kMagic, sizeof(kMagic));
        write_pod(out, kVersion);

        const ModelConfig& c = model.config();
        write_pod(out, static_cast<std::uint32_t>(c.kind));
        write_pod(out, c.k);
        write_pod(out, c.eta);
        write_pod(out, c.learning_rate);
        write_pod(out, c.l2_lambda);
        write_pod(out, c.max_epochs);
        write_pod(out, c.batch_size);
        write_pod(out, c.early_stopping.patience);
        write_pod(out, c.early_stopping.check_interval);
        write_pod(out, c.seed);

        write_pod(out, model.entity_count());
        write_pod(out, model.relation_count());
        write_pod(out, model.trained_epochs());

        const auto& et = model.entity_table();
        const auto& rt = model.relation_table();
        out.write(reinterpret_cast<const char*>(et.data()), et.size() * sizeof(double));
        out.write(reinterpret_cast<const char*>(rt.data()), rt.size() * sizeof(double));

        const std::uint8_t has_cal = calibrator && calibrator->fitted() ? 1 : 0;
        write_pod(out, has_cal);
        if (has_cal) {
            const std::uint8_t method = 0;  // platt
            write_pod(out, method);
            write_pod(out, calibrator->slope());
            write_pod(out, calibrator->intercept());
            write_pod(out, calibrator->negative_ratio());
            write_pod(out, calibrator->model_fingerprint());
        }
    }

    static Snapshot load(std::istream& in) {
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
            throw Error("snapshot: bad magic (not a model snapshot)");
        std::uint32_t version;
        read_pod(in, version);
        if (version != kVersion)
            throw Error("snapshot: unsupported version " + std::to_string(version));

        EmbeddingModel m;
        std::uint32_t kind;
        read_pod(in, kind);
        if (kind > 2) throw Error("snapshot: bad model kind");
        m.config_.kind = static_cast<ModelKind>(kind);
        read_pod(in, m.config_.k);
        read_pod(in, m.config_.eta);
        read_pod(in, m.config_.learning_rate);
        read_pod(in, m.config_.l2_lambda);
        read_pod(in, m.config_.max_epochs);
        read_pod(in, m.config_.batch_size);
        read_pod(in, m.config_.early_stopping.patience);
        read_pod(in, m.config_.early_stopping.check_interval);
        read_pod(in, m.config_.seed);
        m.config_.validate();

        read_pod(in, m.entity_count_);
        read_pod(in, m.relation_count_);
        read_pod(in, m.trained_epochs_);
        if (m.entity_count_ == 0 || m.relation_count_ == 0)
            throw Error("snapshot: empty tables");

        const std::size_t d = static_cast<std::size_t>(m.config_.dim());
        m.entity_table_.resize(m.entity_count_ * d);
        m.relation_table_.resize(m.relation_count_ * d);
        in.read(reinterpret_cast<char*>(m.entity_table_.data()),
                m.entity_table_.size() * sizeof(double));
        in.read(reinterpret_cast<char*>(m.relation_table_.data()),
                m.relation_table_.size() * sizeof(double));
        if (!in) throw Error("snapshot: truncated tables");

        std::optional<Calibrator> calibrator;
        std::uint8_t has_cal;
        read_pod(in, has_cal);
        if (has_cal) {
            std::uint8_t method;
            read_pod(in, method);
            if (method != 0) throw Error("snapshot: unknown calibration method");
            double a, b, ratio;
            std::uint64_t fp;
            read_pod(in, a);
            read_pod(in, b);
            read_pod(in, ratio);
            read_pod(in, fp);
            calibrator = Calibrator(a, b, ratio, fp);
        }
        return Snapshot{std::move(m), std::move(calibrator)};
    }
};

void save_snapshot(const std::string& path, const EmbeddingModel& model, const Calibrator* calibrator) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write snapshot: " + path);
    SnapshotCodec::save(out, model, calibrator);
    if (!out) throw Error("snapshot write failed: " + path);
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot: " + path);
    return SnapshotCodec::load(in);
}

}  // namespace kgex
