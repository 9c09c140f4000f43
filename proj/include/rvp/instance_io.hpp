#pragma once

// Instance files: "key = value" lines, '#' comments.
//   name = hexagon-eps-0.25
//   dimension = 2
//   delta_vertices = [[1,0],[0,1],[-1,1],[-1,0],[0,-1],[1,-1]]
//   dual_vertices = [[1,0],...]          (optional; computed if absent)
//   lambda.0 = -1                        (one line per vertex index)
//   mu.3 = -1/4

#include "rvp/polytope.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace rvp {

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct KeyValue {
    std::string key, value;
    int line;
};

inline std::vector<KeyValue> read_key_values(const std::string& text, const std::string& source) {
    std::vector<KeyValue> out;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, no, line, "expected 'key = value'");
        out.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), no});
    }
    return out;
}

inline std::vector<LatticeVector> parse_vertex_array(const KeyValue& kv, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(kv.value);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, kv.line, kv.key, std::string("malformed array: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw ParseError(source, kv.line, kv.key, "expected a non-empty array of integer arrays");
    std::vector<LatticeVector> out;
    for (const auto& row : j) {
        if (!row.is_array()) throw ParseError(source, kv.line, kv.key, "expected integer arrays");
        LatticeVector v;
        for (const auto& x : row) {
            if (!x.is_number_integer()) throw ParseError(source, kv.line, kv.key, "coordinate " + x.dump() + " is not an integer");
            v.push_back(x.get<std::int64_t>());
        }
        out.push_back(v);
    }
    return out;
}

} // namespace detail

inline WeightedPolytopePair parse_instance(const std::string& text, const std::string& source = "<instance>") {
    WeightedPolytopePair p;
    std::optional<int> dim;
    std::optional<std::vector<LatticeVector>> delta, dual;
    std::map<std::size_t, std::pair<Rational, int>> lambda, mu;
    for (const auto& kv : detail::read_key_values(text, source)) {
        if (kv.key == "name") {
            p.name = kv.value;
        } else if (kv.key == "dimension") {
            try {
                std::size_t pos = 0;
                dim = std::stoi(kv.value, &pos);
                if (pos != kv.value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError(source, kv.line, kv.key, "expected an integer");
            }
            if (*dim < 2 || *dim > 4) throw ParseError(source, kv.line, kv.key, "dimension must be 2, 3 or 4");
        } else if (kv.key == "delta_vertices") {
            delta = detail::parse_vertex_array(kv, source);
        } else if (kv.key == "dual_vertices") {
            dual = detail::parse_vertex_array(kv, source);
        } else if (kv.key.rfind("lambda.", 0) == 0 || kv.key.rfind("mu.", 0) == 0) {
            bool is_lambda = kv.key[0] == 'l';
            std::string idx = kv.key.substr(kv.key.find('.') + 1);
            if (idx.empty() || !std::all_of(idx.begin(), idx.end(), ::isdigit))
                throw ParseError(source, kv.line, kv.key, "vertex index must be a non-negative integer");
            auto r = parse_rational(kv.value);
            if (!r) throw ParseError(source, kv.line, kv.key, "expected a rational 'p/q', got '" + kv.value + "'");
            if (*r >= 0) throw ParseError(source, kv.line, kv.key, "weight must be negative");
            auto& target = is_lambda ? lambda : mu;
            std::size_t i = std::stoul(idx);
            if (target.count(i)) throw ParseError(source, kv.line, kv.key, "duplicate weight");
            target[i] = {*r, kv.line};
        } else {
            throw ParseError(source, kv.line, kv.key, "unknown key");
        }
    }
    if (!dim) throw ParseError(source, 0, "dimension", "missing");
    if (!delta) throw ParseError(source, 0, "delta_vertices", "missing");
    p.dim = *dim;
    p.delta_vertices = *delta;
    for (std::size_t i = 0; i < p.delta_vertices.size(); ++i)
        if (p.delta_vertices[i].size() != static_cast<std::size_t>(p.dim))
            throw ParseError(source, 0, "delta_vertices", "vertex " + std::to_string(i) + " has " +
                                                             std::to_string(p.delta_vertices[i].size()) + " coordinates, expected " + std::to_string(p.dim));
    p.dual_vertices = dual ? *dual : dual_polytope(p.delta_vertices);
    auto fill = [&](const char* key, const std::map<std::size_t, std::pair<Rational, int>>& src, std::size_t n, std::vector<Rational>& dst) {
        for (const auto& [i, v] : src)
            if (i >= n) throw ParseError(source, v.second, std::string(key) + "." + std::to_string(i), "index out of range (" + std::to_string(n) + " vertices)");
        for (std::size_t i = 0; i < n; ++i) {
            auto it = src.find(i);
            if (it == src.end()) throw ParseError(source, 0, std::string(key) + "." + std::to_string(i), "missing weight for vertex index " + std::to_string(i));
            dst.push_back(it->second.first);
        }
    };
    fill("lambda", lambda, p.delta_vertices.size(), p.lambda);
    fill("mu", mu, p.dual_vertices.size(), p.mu);
    validate_pair(p);
    return p;
}

inline WeightedPolytopePair load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open instance file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str(), path);
}

inline std::string serialize_instance(const WeightedPolytopePair& p) {
    auto arr = [](const std::vector<LatticeVector>& vs) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& v : vs) j.push_back(v);
        return j.dump();
    };
    std::ostringstream os;
    if (!p.name.empty()) os << "name = " << p.name << "\n";
    os << "dimension = " << p.dim << "\n";
    os << "delta_vertices = " << arr(p.delta_vertices) << "\n";
    os << "dual_vertices = " << arr(p.dual_vertices) << "\n";
    for (std::size_t i = 0; i < p.lambda.size(); ++i) os << "lambda." << i << " = " << format_rational(p.lambda[i]) << "\n";
    for (std::size_t i = 0; i < p.mu.size(); ++i) os << "mu." << i << " = " << format_rational(p.mu[i]) << "\n";
    return os.str();
}

} // namespace rvp
