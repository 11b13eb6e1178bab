#include "qsplit/model_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qsplit {

using nlohmann::json;

IsingModel model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
    try {
        const auto n = doc.at("n").get<std::size_t>();
        if (n == 0) throw std::invalid_argument("model JSON: n must be >= 1");
        const double offset = doc.value("offset", 0.0);
        std::vector<double> biases(n, 0.0);
        if (doc.contains("biases")) {
            biases = doc.at("biases").get<std::vector<double>>();
            if (biases.size() != n) throw std::invalid_argument("model JSON: biases length != n");
        }
        // (lo, hi) -> values given as (lo, hi) and as (hi, lo)
        std::map<std::pair<std::size_t, std::size_t>, std::pair<std::optional<double>, std::optional<double>>> pairs;
        for (const auto& c : doc.value("couplings", json::array())) {
            if (!c.is_array() || c.size() != 3) throw std::invalid_argument("model JSON: coupling must be [i, j, value]");
            const auto i = c[0].get<std::size_t>();
            const auto j = c[1].get<std::size_t>();
            const auto v = c[2].get<double>();
            if (i >= n || j >= n) throw std::invalid_argument("model JSON: coupling index out of range");
            auto& slot = pairs[std::minmax(i, j)];
            auto& target = i <= j ? slot.first : slot.second;
            if (target) {
                throw std::invalid_argument("model JSON: duplicate coupling (" + std::to_string(i) + ", " +
                                            std::to_string(j) + ")");
            }
            target = v;
        }
        std::vector<Triplet> terms;
        terms.reserve(pairs.size());
        for (const auto& [key, values] : pairs) {
            double v = 0.0;
            if (values.first && values.second) v = 0.5 * (*values.first + *values.second);
            else v = values.first ? *values.first : *values.second;
            terms.push_back({key.first, key.second, v});
        }
        return IsingModel(SymmetricMatrix::from_symmetric_terms(n, terms), std::move(biases), offset);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
}

std::string model_to_json(const IsingModel& model) {
    json couplings = json::array();
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (const auto& e : model.couplings().row(i)) {
            if (e.col >= i) couplings.push_back(json::array({i, e.col, e.value}));
        }
    }
    json doc = {{"n", model.size()}, {"offset", model.offset()}, {"biases", model.biases()}, {"couplings", couplings}};
    return doc.dump() + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
}

} // namespace qsplit
