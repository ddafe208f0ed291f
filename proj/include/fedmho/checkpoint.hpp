#pragma once

#include <string>

#include "fedmho/cvae.hpp"
#include "fedmho/data.hpp"
#include "fedmho/mlp.hpp"

namespace fedmho {

// Checkpoint format: one plain-text header line naming the model family and its
// layer dims, then every parameter as raw little-endian 64-bit floats in layer
// order (weights row-major, then biases).
void save_classifier(const MlpClassifier& model, const std::string& path);
MlpClassifier load_classifier(const std::string& path);

void save_decoder(const CvaeDecoder& decoder, const std::string& path);
CvaeDecoder load_decoder(const std::string& path);

// Label-histogram sidecar: line 1 = class count, line 2 = space-separated counts.
void save_histogram(const LabelDistribution& dist, const std::string& path);
LabelDistribution load_histogram(const std::string& path);

}  // namespace fedmho
