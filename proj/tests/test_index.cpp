#include "helpers.hpp"

#include "nlbi/index_io.hpp"
#include "nlbi/verify.hpp"

#include <doctest.h>

#include <sstream>

using namespace nlbi;

namespace {

std::vector<DiscreteDistribution> corpus(std::size_t n, std::uint64_t seed, std::size_t bins = 12) {
    CorpusSpec recipe;
    recipe.count = n;
    recipe.bins = bins;
    return generate_synthetic(recipe, seed);
}

std::string serialize(const Index& index) {
    std::ostringstream out(std::ios::binary);
    write_index(out, index);
    return out.str();
}

}  // namespace

TEST_SUITE("index build") {
    TEST_CASE("defaults: two projections on 2-D data, s = round(ln n)") {
        const auto index = build_index(corpus(300, 1, 16));
        CHECK(index.projections().size() == 2);
        CHECK(index.sub_intervals() == 3);
        CHECK(index.node_capacity() == 100);
        CHECK(summary_table_reals(index) == 300u * 2u * (3u + 2u * 3u));
        for (const auto& p : index.projections()) {
            CHECK(p.summaries.size() == 300);
            CHECK(audit_quadtree(p.tree, p.points, p.summaries).empty());
        }
        CHECK(*index.position_of(17) == 17);
        CHECK_FALSE(index.position_of(100000).has_value());
    }

    TEST_CASE("invalid configurations are input errors") {
        BuildConfig too_many;
        too_many.projections = 3;
        CHECK_THROWS_AS(build_index(corpus(10, 2), too_many), InputError);
        BuildConfig zero_cap;
        zero_cap.node_capacity = 0;
        CHECK_THROWS_AS(build_index(corpus(10, 2), zero_cap), InputError);
        CHECK_THROWS_AS(build_index(std::vector<DiscreteDistribution>{}), InputError);
        auto dup = corpus(3, 2);
        dup.push_back(dup[0]);
        CHECK_THROWS_AS(build_index(dup), InputError);
    }
}

TEST_SUITE("index file") {
    TEST_CASE("save and load round-trip bit for bit") {
        BuildConfig config;
        config.sub_intervals = 4;
        config.node_capacity = 20;
        const auto index = build_index(corpus(250, 3), config);
        const std::string bytes = serialize(index);
        std::istringstream in(bytes, std::ios::binary);
        IndexFileLayout layout;
        const auto back = read_index(in, &layout);
        CHECK(layout.summary_table_bytes == 250u * 2u * (3u + 2u * 4u) * 8u);
        CHECK(layout.summary_bytes_read == layout.summary_table_bytes);
        CHECK(layout.total_bytes == bytes.size());
        CHECK(serialize(back) == bytes);
        CHECK(back.sub_intervals() == 4);
        CHECK(back.node_capacity() == 20);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(back.projections()[j].vector == index.projections()[j].vector);
            CHECK(back.projections()[j].summaries[7].errors.err_max == index.projections()[j].summaries[7].errors.err_max);
            CHECK(back.projections()[j].tree.nodes().size() == index.projections()[j].tree.nodes().size());
        }
    }

    TEST_CASE("rebuilding the same dataset gives a byte-identical file") {
        CHECK(serialize(build_index(corpus(120, 4))) == serialize(build_index(corpus(120, 4))));
    }

    TEST_CASE("bad magic, version and truncation are format errors") {
        const std::string bytes = serialize(build_index(corpus(50, 5)));
        std::string bad = bytes;
        bad[0] = 'X';
        std::istringstream magic(bad);
        CHECK_THROWS_AS(read_index(magic), FormatError);
        std::string version = bytes;
        version[4] = 9;
        std::istringstream v(version);
        CHECK_THROWS_AS(read_index(v), FormatError);
        std::istringstream cut(bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(read_index(cut), FormatError);
    }

    TEST_CASE("verify passes on a fresh index and catches a tampered summary") {
        const auto index = build_index(corpus(200, 6));
        const std::string bytes = serialize(index);
        std::istringstream in(bytes);
        IndexFileLayout layout;
        const auto loaded = read_index(in, &layout);
        VerifyOptions options;
        options.bound_pairs = 100;
        const auto report = verify_index(loaded, &layout, options);
        for (const auto& f : report.failures) {
            INFO(f);
        }
        CHECK(report.ok());

        // Flip one stored mu: the header is fixed-size, then grids, then the table.
        std::string tampered = bytes;
        const std::size_t header = 4 + 4 + 8 + 4 + 4 + 4;
        const std::size_t per_projection = (2 + 3) * 8 + 4 + (index.sub_intervals() + 1) * 8;
        const std::size_t table = header + 2 * per_projection + 8;
        tampered[table + 3] ^= 0x10;
        std::istringstream tin(tampered);
        const auto broken = read_index(tin, &layout);
        CHECK_FALSE(verify_index(broken, &layout, options).ok());
    }
}
