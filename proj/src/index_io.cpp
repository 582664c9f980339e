#include "nlbi/index_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace nlbi {

namespace {

constexpr std::array<char, 4> kMagic{'N', 'L', 'B', 'I'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u32(std::uint32_t x) { put(x, 4); }
    void u64(std::uint64_t x) { put(x, 8); }
    void f64(double x) { put(std::bit_cast<std::uint64_t>(x), 8); }
    void bytes(const char* data, std::size_t n) {
        out_.write(data, static_cast<std::streamsize>(n));
        written_ += n;
    }
    std::uint64_t written() const { return written_; }

private:
    void put(std::uint64_t x, int width) {
        std::array<char, 8> buf{};
        for (int i = 0; i < width; ++i) {
            buf[i] = static_cast<char>((x >> (8 * i)) & 0xffu);
        }
        bytes(buf.data(), static_cast<std::size_t>(width));
    }

    std::ostream& out_;
    std::uint64_t written_ = 0;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(get(8)); }
    void bytes(char* data, std::size_t n, const char* what) {
        in_.read(data, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw FormatError(std::string("index file truncated while reading ") + what);
        }
        read_ += n;
    }
    std::uint64_t read() const { return read_; }

    // Rejects counts that could not possibly fit in the remaining input.
    std::size_t count(std::uint64_t n, const char* what, std::uint64_t limit = 1ull << 34) {
        if (n > limit) {
            throw FormatError(std::string("implausible ") + what + " count " + std::to_string(n));
        }
        return static_cast<std::size_t>(n);
    }

private:
    std::uint64_t get(int width) {
        std::array<unsigned char, 8> buf{};
        bytes(reinterpret_cast<char*>(buf.data()), static_cast<std::size_t>(width), "a number");
        std::uint64_t x = 0;
        for (int i = width - 1; i >= 0; --i) {
            x = (x << 8) | buf[i];
        }
        return x;
    }

    std::istream& in_;
    std::uint64_t read_ = 0;
};

void write_region(Writer& w, const BoundingRegion& r) {
    w.f64(r.u_lo);
    w.f64(r.u_hi);
    w.f64(r.v_lo);
    w.f64(r.v_hi);
    w.f64(r.err_full_min);
    w.f64(r.err_full_max);
    for (double x : r.err_min) {
        w.f64(x);
    }
    for (double x : r.err_max) {
        w.f64(x);
    }
    w.u32(r.member_count);
}

BoundingRegion read_region(Reader& r, std::size_t s) {
    BoundingRegion g;
    g.u_lo = r.f64();
    g.u_hi = r.f64();
    g.v_lo = r.f64();
    g.v_hi = r.f64();
    g.err_full_min = r.f64();
    g.err_full_max = r.f64();
    g.err_min.resize(s);
    g.err_max.resize(s);
    for (double& x : g.err_min) {
        x = r.f64();
    }
    for (double& x : g.err_max) {
        x = r.f64();
    }
    g.member_count = r.u32();
    g.lowest_err_min = *std::min_element(g.err_min.begin(), g.err_min.end());
    g.highest_err_max = *std::max_element(g.err_max.begin(), g.err_max.end());
    return g;
}

}  // namespace

void write_index(std::ostream& out, const Index& index) {
    Writer w(out);
    const std::size_t n = index.size();
    const std::size_t dim = index.dim();
    const auto projections = index.projections();

    w.bytes(kMagic.data(), kMagic.size());
    w.u32(kIndexFormatVersion);
    w.u64(n);
    w.u32(static_cast<std::uint32_t>(dim));
    w.u32(static_cast<std::uint32_t>(projections.size()));
    w.u32(static_cast<std::uint32_t>(index.node_capacity()));

    for (const auto& proj : projections) {
        for (double c : proj.vector.components) {
            w.f64(c);
        }
        w.f64(proj.vector.center);
        w.f64(proj.vector.t_min);
        w.f64(proj.vector.t_max);
        w.u32(static_cast<std::uint32_t>(proj.grid.count()));
        for (double b : proj.grid.boundaries()) {
            w.f64(b);
        }
    }

    w.u64(summary_table_reals(index) * sizeof(double));
    for (const auto& proj : projections) {
        for (const auto& sm : proj.summaries) {
            w.f64(sm.normal.mu);
            w.f64(sm.normal.sigma);
            w.f64(sm.errors.err_full);
            for (double x : sm.errors.err_min) {
                w.f64(x);
            }
            for (double x : sm.errors.err_max) {
                w.f64(x);
            }
        }
    }

    for (const auto& proj : projections) {
        const auto nodes = proj.tree.nodes();
        w.u64(nodes.size());
        for (const auto& node : nodes) {
            w.u32(node.depth);
            write_region(w, node.region);
            w.u32(static_cast<std::uint32_t>(node.children.size()));
            for (auto c : node.children) {
                w.u32(c);
            }
            w.u32(static_cast<std::uint32_t>(node.entries.size()));
            for (auto e : node.entries) {
                w.u32(e);
            }
        }
    }

    w.u64(n);
    for (const auto& p : index.objects()) {
        w.u64(p.id());
        w.u32(static_cast<std::uint32_t>(p.size()));
        for (double c : p.coords()) {
            w.f64(c);
        }
        for (double x : p.weights()) {
            w.f64(x);
        }
    }
    if (!out) {
        throw std::runtime_error("failed writing index");
    }
}

void save_index(const std::filesystem::path& path, const Index& index) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    write_index(out, index);
}

Index read_index(std::istream& in, IndexFileLayout* layout) {
    Reader r(in);
    std::array<char, 4> magic{};
    r.bytes(magic.data(), magic.size(), "the magic bytes");
    if (magic != kMagic) {
        throw FormatError("not an index file (bad magic bytes)");
    }
    const std::uint32_t version = r.u32();
    if (version != kIndexFormatVersion) {
        throw FormatError("unsupported index format version " + std::to_string(version));
    }
    const std::size_t n = r.count(r.u64(), "object");
    const std::size_t dim = r.count(r.u32(), "dimension", 1u << 20);
    const std::size_t p_count = r.count(r.u32(), "projection", 1u << 20);
    const std::size_t capacity = r.u32();
    if (n == 0 || dim == 0 || p_count == 0 || capacity == 0) {
        throw FormatError("index header has a zero count");
    }

    std::vector<ProjectionVector> vectors(p_count);
    std::vector<std::vector<double>> boundaries(p_count);
    for (std::size_t j = 0; j < p_count; ++j) {
        auto& v = vectors[j];
        v.components.resize(dim);
        for (double& c : v.components) {
            c = r.f64();
        }
        v.center = r.f64();
        v.t_min = r.f64();
        v.t_max = r.f64();
        const std::size_t s = r.count(r.u32(), "sub-interval", 1u << 20);
        if (s == 0) {
            throw FormatError("projection with zero sub-intervals");
        }
        boundaries[j].resize(s + 1);
        for (double& b : boundaries[j]) {
            b = r.f64();
        }
    }
    const std::size_t s = boundaries.front().size() - 1;
    for (const auto& b : boundaries) {
        if (b.size() != s + 1) {
            throw FormatError("projections use different sub-interval counts");
        }
    }

    IndexFileLayout info;
    info.summary_table_bytes = r.u64();
    const std::uint64_t table_start = r.read();
    std::vector<std::vector<NormalSummary>> summaries(p_count);
    for (std::size_t j = 0; j < p_count; ++j) {
        summaries[j].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            NormalParams normal;
            normal.mu = r.f64();
            normal.sigma = r.f64();
            ErrorProfile e;
            e.err_full = r.f64();
            e.err_min.resize(s);
            e.err_max.resize(s);
            for (double& x : e.err_min) {
                x = r.f64();
            }
            for (double& x : e.err_max) {
                x = r.f64();
            }
            if (!(normal.sigma > 0.0)) {
                throw FormatError("summary with non-positive sigma");
            }
            summaries[j].emplace_back(0, normal, std::move(e));
        }
    }
    info.summary_bytes_read = r.read() - table_start;
    if (info.summary_bytes_read != info.summary_table_bytes) {
        throw FormatError("summary table length field says " + std::to_string(info.summary_table_bytes) +
                          " bytes but the table holds " + std::to_string(info.summary_bytes_read));
    }

    std::vector<std::vector<QuadTreeNode>> trees(p_count);
    for (std::size_t j = 0; j < p_count; ++j) {
        const std::size_t count = r.count(r.u64(), "node", 4ull * n + 64);
        trees[j].resize(count);
        for (auto& node : trees[j]) {
            node.depth = r.u32();
            node.region = read_region(r, s);
            node.children.resize(r.count(r.u32(), "child", 4));
            for (auto& c : node.children) {
                c = r.u32();
                if (c >= count) {
                    throw FormatError("child index out of range");
                }
            }
            node.entries.resize(r.count(r.u32(), "entry", n));
            for (auto& e : node.entries) {
                e = r.u32();
                if (e >= n) {
                    throw FormatError("leaf entry out of range");
                }
            }
        }
    }

    if (r.u64() != n) {
        throw FormatError("object section count differs from the header");
    }
    std::vector<DiscreteDistribution> objects;
    objects.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ObjectId id = r.u64();
        const std::size_t bins = r.count(r.u32(), "bin", 1u << 26);
        std::vector<double> coords(bins * dim);
        std::vector<double> weights(bins);
        for (double& c : coords) {
            c = r.f64();
        }
        for (double& x : weights) {
            x = r.f64();
        }
        try {
            objects.emplace_back(id, dim, std::move(coords), std::move(weights));
        } catch (const std::exception& e) {
            throw FormatError(std::string("stored object is invalid: ") + e.what());
        }
    }
    info.total_bytes = r.read();

    std::vector<ProjectionIndex> projections;
    projections.reserve(p_count);
    for (std::size_t j = 0; j < p_count; ++j) {
        SubIntervalGrid grid(s, vectors[j].t_min, vectors[j].t_max);
        if (!std::equal(boundaries[j].begin(), boundaries[j].end(), grid.boundaries().begin())) {
            throw FormatError("stored sub-interval boundaries are not the even grid of the range");
        }
        std::vector<DominancePoint> points;
        points.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            summaries[j][i].object_id = objects[i].id();
            points.push_back(to_dominance_point(summaries[j][i].normal, grid.t_min(), grid.t_max(), objects[i].id()));
        }
        projections.push_back({std::move(vectors[j]), std::move(grid), std::move(summaries[j]), std::move(points),
                               QuadTree(std::move(trees[j]), capacity)});
    }
    if (layout) {
        *layout = info;
    }
    return {std::move(objects), std::move(projections), capacity};
}

Index load_index(const std::filesystem::path& path, IndexFileLayout* layout) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return read_index(in, layout);
}

}  // namespace nlbi
