#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvinf/graph.hpp"

namespace mvinf {

struct SynthViewSpec {
    std::string name;
    ViewKind kind = ViewKind::weighted;
    WeightTransform transform = WeightTransform::none; // weighted views only
    double geom_p = 0.5; // success probability for geometric edge counts
};

/// Directed stochastic block model with optional hub nodes. Edge i -> j
/// exists with the block probability (within_probs[c] inside community c,
/// between_prob across); when j is a hub the probability is multiplied by
/// hub_multiplier and capped at 1. Weighted views draw a geometric raw count
/// per edge and store the transformed weight.
struct SynthSpec {
    int n = 0;
    std::vector<int> community_sizes;
    std::vector<double> within_probs; // one per community, or a single shared value
    double between_prob = 0.0;
    std::vector<int> hub_nodes;
    double hub_multiplier = 1.0;
    std::vector<SynthViewSpec> views;
    std::uint64_t seed = 1;
};

struct SynthResult {
    MultiviewNetwork network;
    std::vector<int> labels; // community index per node
};

/// Node ids are "n000", "n001", ... zero-padded to the width of n-1. Each
/// view draws from its own derived RNG stream, so adding a view never
/// changes earlier ones.
SynthResult generate_synthetic(const SynthSpec& spec);

} // namespace mvinf
