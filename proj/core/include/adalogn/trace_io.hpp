#pragma once

#include <string>
#include <vector>

#include "adalogn/model.hpp"

namespace adalogn {

/// JSON document with one entry per option trace:
/// {"variant", "tau", "options": [{"score", "h_v", "h_g", "pool_attention",
///   "iterations": [{"rel_mean", "admitted", "candidates": [...],
///   "neighbor_attention", "subgraph_attention", "gates", ...}]}]}
std::string trace_document(const ModelConfig& cfg, const std::vector<ForwardTrace>& traces);

}  // namespace adalogn
