#pragma once

#include <optional>
#include <string>

#include "kgex/calibrator.hpp"
#include "kgex/embedding_model.hpp"

namespace kgex {

// Versioned binary container for a model and (optionally) its calibrator.
// Doubles are stored raw, so save/load round-trips bitwise.
struct Snapshot {
    EmbeddingModel model;
    std::optional<Calibrator> calibrator;
};

void save_snapshot(const std::string& path, const EmbeddingModel& model,
                   const Calibrator* calibrator = nullptr);
Snapshot load_snapshot(const std::string& path);

}  // namespace kgex
