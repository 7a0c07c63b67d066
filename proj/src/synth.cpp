#include "mvinf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mvinf/rng.hpp"

namespace mvinf {

SynthResult generate_synthetic(const SynthSpec& spec) {
    if (spec.n < 1) throw ConfigError("synthetic network needs n >= 1");
    if (spec.community_sizes.empty()) throw ConfigError("no community sizes given");
    long total = std::accumulate(spec.community_sizes.begin(), spec.community_sizes.end(), 0L);
    if (total != spec.n)
        throw ConfigError("community sizes sum to " + std::to_string(total) + ", expected " +
                          std::to_string(spec.n));
    for (int s : spec.community_sizes)
        if (s < 1) throw ConfigError("community sizes must be positive");

    size_t ncomm = spec.community_sizes.size();
    std::vector<double> within = spec.within_probs;
    if (within.size() == 1) within.assign(ncomm, within[0]);
    if (within.size() != ncomm)
        throw ConfigError("need one within-probability per community (or a single shared value)");
    for (double p : within)
        if (p < 0.0 || p > 1.0) throw ConfigError("within probability outside [0, 1]");
    if (spec.between_prob < 0.0 || spec.between_prob > 1.0)
        throw ConfigError("between probability outside [0, 1]");
    if (spec.hub_multiplier < 0.0) throw ConfigError("hub multiplier must be nonnegative");
    for (int h : spec.hub_nodes)
        if (h < 0 || h >= spec.n) throw ConfigError("hub index " + std::to_string(h) + " out of range");
    if (spec.views.empty()) throw ConfigError("synthetic spec has no views");
    for (const auto& vs : spec.views) {
        if (vs.kind == ViewKind::weighted && (vs.geom_p <= 0.0 || vs.geom_p > 1.0))
            throw ConfigError("view '" + vs.name + "': geometric p outside (0, 1]");
        if (vs.kind == ViewKind::binary && vs.transform == WeightTransform::log1p_counts)
            throw ConfigError("view '" + vs.name + "': log1p transform requires a weighted view");
    }

    SynthResult out;
    out.labels.resize(static_cast<size_t>(spec.n));
    {
        int node = 0;
        for (size_t c = 0; c < ncomm; ++c)
            for (int i = 0; i < spec.community_sizes[c]; ++i)
                out.labels[static_cast<size_t>(node++)] = static_cast<int>(c);
    }

    int width = static_cast<int>(std::to_string(spec.n - 1).size());
    for (int i = 0; i < spec.n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "n%0*d", width, i);
        out.network.registry.add(buf);
    }

    std::vector<char> is_hub(static_cast<size_t>(spec.n), 0);
    for (int h : spec.hub_nodes) is_hub[static_cast<size_t>(h)] = 1;

    for (size_t m = 0; m < spec.views.size(); ++m) {
        const auto& vs = spec.views[m];
        Rng rng(derive_seed(spec.seed, m));
        NetworkView view;
        view.name = vs.name;
        view.kind = vs.kind;
        view.adj = Eigen::MatrixXd::Zero(spec.n, spec.n);
        for (int i = 0; i < spec.n; ++i) {
            for (int j = 0; j < spec.n; ++j) {
                if (i == j) continue;
                double p = out.labels[static_cast<size_t>(i)] == out.labels[static_cast<size_t>(j)]
                               ? within[static_cast<size_t>(out.labels[static_cast<size_t>(i)])]
                               : spec.between_prob;
                if (is_hub[static_cast<size_t>(j)]) p = std::min(1.0, p * spec.hub_multiplier);
                if (rng.uniform() >= p) continue;
                if (vs.kind == ViewKind::binary) {
                    view.adj(i, j) = 1.0;
                } else {
                    double count = static_cast<double>(rng.geometric(vs.geom_p));
                    view.adj(i, j) = vs.transform == WeightTransform::log1p_counts
                                         ? std::log1p(count)
                                         : count;
                }
            }
        }
        out.network.add_view(std::move(view));
    }
    return out;
}

} // namespace mvinf
