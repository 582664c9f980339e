#include "nlbi/synthetic.hpp"

#include <cmath>
#include <random>

namespace nlbi {

namespace {

struct Blob {
    std::vector<double> center;
    std::vector<double> width;
    double amplitude;
};

struct Prototype {
    std::vector<Blob> blobs;
    std::vector<double> locations;  // scattered layout only
};

class Generator {
public:
    Generator(const CorpusSpec& recipe, std::uint64_t seed) : spec_(recipe), rng_(seed) {
        if (recipe.count == 0) {
            throw InputError("generate_synthetic: count must be positive");
        }
        if (recipe.bins == 0) {
            throw InputError("generate_synthetic: bin count must be positive");
        }
        if (recipe.dim == 0) {
            throw InputError("generate_synthetic: dimension must be positive");
        }
        if (!(recipe.spread >= 0.0)) {
            throw InputError("generate_synthetic: spread must be non-negative");
        }
        if (recipe.layout == BinLayout::Grid) {
            grid_ = grid_locations();
        }
        for (std::size_t c = 0; c < recipe.clusters; ++c) {
            prototypes_.push_back(draw_prototype());
        }
    }

    void run(std::vector<DiscreteDistribution>* out, std::vector<std::size_t>* labels) {
        for (std::size_t i = 0; i < spec_.count; ++i) {
            std::size_t label = i;
            Prototype fresh;
            const Prototype* proto = nullptr;
            if (spec_.clusters == 0) {
                fresh = draw_prototype();
                proto = &fresh;
            } else {
                label = std::uniform_int_distribution<std::size_t>(0, spec_.clusters - 1)(rng_);
                proto = &prototypes_[label];
            }
            auto dist = draw_member(*proto, spec_.first_id + i);
            if (out != nullptr) {
                out->push_back(std::move(dist));
            }
            if (labels != nullptr) {
                labels->push_back(label);
            }
        }
    }

private:
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double gauss() { return normal_(rng_); }

    std::vector<double> grid_locations() const {
        std::size_t side = 1;
        while (std::pow(static_cast<double>(side), static_cast<double>(spec_.dim)) <
               static_cast<double>(spec_.bins)) {
            ++side;
        }
        const double scale = side > 1 ? 1.0 / static_cast<double>(side - 1) : 0.0;
        std::vector<double> locs;
        locs.reserve(spec_.bins * spec_.dim);
        for (std::size_t cell = 0; cell < spec_.bins; ++cell) {
            std::size_t rest = cell;
            std::vector<double> x(spec_.dim);
            for (std::size_t k = spec_.dim; k-- > 0;) {
                x[k] = static_cast<double>(rest % side) * scale;
                rest /= side;
            }
            locs.insert(locs.end(), x.begin(), x.end());
        }
        return locs;
    }

    Prototype draw_prototype() {
        Prototype proto;
        const auto blob_count = std::uniform_int_distribution<int>(1, 3)(rng_);
        for (int b = 0; b < blob_count; ++b) {
            Blob blob;
            for (std::size_t k = 0; k < spec_.dim; ++k) {
                blob.center.push_back(uniform(0.0, 1.0));
                blob.width.push_back(uniform(0.08, 0.4));
            }
            blob.amplitude = uniform(0.3, 1.0);
            proto.blobs.push_back(std::move(blob));
        }
        if (spec_.layout == BinLayout::Scattered) {
            for (std::size_t i = 0; i < spec_.bins; ++i) {
                const auto& blob = proto.blobs[i % proto.blobs.size()];
                for (std::size_t k = 0; k < spec_.dim; ++k) {
                    proto.locations.push_back(blob.center[k] + blob.width[k] * gauss());
                }
            }
        }
        return proto;
    }

    DiscreteDistribution draw_member(const Prototype& proto, ObjectId id) {
        const double s = spec_.spread;
        std::vector<Blob> blobs = proto.blobs;
        for (auto& blob : blobs) {
            for (std::size_t k = 0; k < spec_.dim; ++k) {
                blob.center[k] += 0.15 * s * gauss();
                blob.width[k] *= std::exp(0.2 * s * gauss());
            }
            blob.amplitude *= std::exp(0.3 * s * gauss());
        }

        std::vector<double> coords;
        if (spec_.layout == BinLayout::Grid) {
            coords = grid_;
        } else {
            coords = proto.locations;
            for (double& x : coords) {
                x += 0.05 * s * gauss();
            }
        }

        std::vector<double> weights(spec_.bins);
        for (std::size_t i = 0; i < spec_.bins; ++i) {
            double density = 0.0;
            for (const auto& blob : blobs) {
                double z2 = 0.0;
                for (std::size_t k = 0; k < spec_.dim; ++k) {
                    const double z = (coords[i * spec_.dim + k] - blob.center[k]) / blob.width[k];
                    z2 += z * z;
                }
                density += blob.amplitude * std::exp(-0.5 * z2);
            }
            weights[i] = (density + 1e-3) * std::exp(0.3 * s * gauss());
        }
        return {id, spec_.dim, std::move(coords), std::move(weights), Normalization::Renormalize};
    }

    CorpusSpec spec_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    std::vector<double> grid_;
    std::vector<Prototype> prototypes_;
};

}  // namespace

BinLayout parse_layout(const std::string& name) {
    if (name == "grid") {
        return BinLayout::Grid;
    }
    if (name == "scattered") {
        return BinLayout::Scattered;
    }
    throw InputError("unknown bin layout '" + name + "' (expected grid or scattered)");
}

std::vector<DiscreteDistribution> generate_synthetic(const CorpusSpec& recipe, std::uint64_t seed) {
    std::vector<DiscreteDistribution> out;
    out.reserve(recipe.count);
    Generator(recipe, seed).run(&out, nullptr);
    return out;
}

std::vector<std::size_t> synthetic_cluster_labels(const CorpusSpec& recipe, std::uint64_t seed) {
    std::vector<std::size_t> labels;
    Generator(recipe, seed).run(nullptr, &labels);
    return labels;
}

}  // namespace nlbi
