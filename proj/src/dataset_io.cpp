#include "nlbi/dataset_io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_set>

namespace nlbi {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, const char* field) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, std::string("invalid ") + field + " '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> parse_reals(std::string_view text, char sep, std::size_t line, const char* field) {
    std::vector<double> values;
    for (std::string_view part : split(text, sep)) {
        values.push_back(parse_number<double>(part, line, field));
    }
    return values;
}

DiscreteDistribution parse_tabbed(std::string_view text, std::size_t line, Normalization mode) {
    const auto fields = split(text, '\t');
    if (fields.size() != 5) {
        throw ParseError(line, "expected 5 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const auto id = parse_number<ObjectId>(fields[0], line, "id");
    const auto dim = parse_number<std::size_t>(fields[1], line, "dimension");
    const auto n = parse_number<std::size_t>(fields[2], line, "bin count");
    if (dim == 0 || n == 0) {
        throw ParseError(line, "dimension and bin count must be positive");
    }

    const auto bins = split(fields[3], ';');
    if (bins.size() != n) {
        throw ParseError(line, "expected " + std::to_string(n) + " bins, got " + std::to_string(bins.size()));
    }
    std::vector<double> coords;
    coords.reserve(n * dim);
    for (std::string_view bin : bins) {
        const auto xs = parse_reals(bin, ',', line, "coordinate");
        if (xs.size() != dim) {
            throw ParseError(line, "bin has " + std::to_string(xs.size()) + " coordinates, expected " +
                                       std::to_string(dim));
        }
        coords.insert(coords.end(), xs.begin(), xs.end());
    }
    auto weights = parse_reals(fields[4], ',', line, "weight");
    if (weights.size() != n) {
        throw ParseError(line, "expected " + std::to_string(n) + " weights, got " +
                                   std::to_string(weights.size()));
    }
    return {id, dim, std::move(coords), std::move(weights), mode};
}

DiscreteDistribution parse_json(std::string_view text, std::size_t line, Normalization mode) {
    nlohmann::json record;
    try {
        record = nlohmann::json::parse(text);
        const auto id = record.at("id").get<ObjectId>();
        const auto& bins = record.at("bins");
        auto weights = record.at("weights").get<std::vector<double>>();
        if (!bins.is_array() || bins.empty()) {
            throw ParseError(line, "\"bins\" must be a non-empty array");
        }
        const std::size_t dim = bins.front().size();
        std::vector<double> coords;
        for (const auto& bin : bins) {
            auto xs = bin.get<std::vector<double>>();
            if (xs.size() != dim || dim == 0) {
                throw ParseError(line, "inconsistent bin dimensions");
            }
            coords.insert(coords.end(), xs.begin(), xs.end());
        }
        if (weights.size() != bins.size()) {
            throw ParseError(line, "bins and weights differ in length");
        }
        return {id, dim, std::move(coords), std::move(weights), mode};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line, std::string("invalid JSON record: ") + e.what());
    }
}

void append_real(std::string& out, double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out.append(buf, ptr);
}

}  // namespace

std::vector<DiscreteDistribution> read_dataset(std::istream& in, const LoadOptions& options) {
    const Normalization mode = options.renormalize ? Normalization::Renormalize : Normalization::Strict;
    std::vector<DiscreteDistribution> dataset;
    std::unordered_set<ObjectId> ids;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text = trim(raw);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        try {
            dataset.push_back(text.front() == '{' ? parse_json(text, line, mode)
                                                  : parse_tabbed(text, line, mode));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line) + ": " + e.what());
        } catch (const InputError& e) {
            throw ParseError(line, e.what());
        }
        if (!ids.insert(dataset.back().id()).second) {
            throw ValidationError("line " + std::to_string(line) + ": duplicate id " +
                                  std::to_string(dataset.back().id()));
        }
        if (dataset.back().dim() != dataset.front().dim()) {
            throw ValidationError("line " + std::to_string(line) + ": dimension differs from first record");
        }
    }
    return dataset;
}

std::vector<DiscreteDistribution> load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open dataset '" + path.string() + "'");
    }
    return read_dataset(in, options);
}

void write_dataset(std::ostream& out, std::span<const DiscreteDistribution> dataset) {
    std::string line;
    for (const auto& dist : dataset) {
        line.clear();
        line += std::to_string(dist.id());
        line += '\t';
        line += std::to_string(dist.dim());
        line += '\t';
        line += std::to_string(dist.size());
        line += '\t';
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (i > 0) {
                line += ';';
            }
            const auto bin = dist.bin(i);
            for (std::size_t k = 0; k < bin.size(); ++k) {
                if (k > 0) {
                    line += ',';
                }
                append_real(line, bin[k]);
            }
        }
        line += '\t';
        const auto w = dist.weights();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i > 0) {
                line += ',';
            }
            append_real(line, w[i]);
        }
        line += '\n';
        out << line;
    }
}

void save_dataset(const std::filesystem::path& path, std::span<const DiscreteDistribution> dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write dataset '" + path.string() + "'");
    }
    write_dataset(out, dataset);
}

}  // namespace nlbi
