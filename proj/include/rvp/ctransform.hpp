#pragma once

// c-transforms for the pairing cost c(x, p) = <x, p> between the two clouds.

#include "rvp/mesh.hpp"

#include <limits>
#include <sstream>

namespace rvp {

struct Potential {
    Side side = Side::Dual;
    std::vector<double> values;
    bool c_closed = false;

    std::size_t size() const { return values.size(); }
    double max() const { return *std::max_element(values.begin(), values.end()); }
    double min() const { return *std::min_element(values.begin(), values.end()); }
};

inline constexpr double kClosedTolerance = 1e-10;

namespace detail {

inline void check_pair(const Potential& f, const SampleCloud& a, const SampleCloud& b) {
    if (a.points.empty() || b.points.empty()) throw Error(Errc::EmptyCloud, "c-transform over an empty cloud");
    if (f.side != a.side || a.side == b.side) throw Error(Errc::SideMismatch, "potential and clouds are not on opposite sides");
    if (f.values.size() != a.points.size()) throw Error(Errc::InvalidArgument, "potential size does not match its cloud");
}

} // namespace detail

// g(p) = max_x <x,p> - f(x); argmax (lowest index on ties) written to `arg` if given.
inline Potential c_transform(const Potential& f, const SampleCloud& a, const SampleCloud& b, std::vector<std::size_t>* arg = nullptr) {
    detail::check_pair(f, a, b);
    Potential g;
    g.side = b.side;
    g.c_closed = true; // any transform lies in the image class
    g.values.assign(b.size(), -std::numeric_limits<double>::infinity());
    if (arg) arg->assign(b.size(), 0);
    for (std::size_t j = 0; j < b.size(); ++j) {
        const auto& p = b.points[j].x;
        double best = -std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double v = dot(a.points[i].x, p) - f.values[i];
            if (v > best) {
                best = v;
                bi = i;
            }
        }
        g.values[j] = best;
        if (arg) (*arg)[j] = bi;
    }
    return g;
}

// f^cc; never above f, and a fixed point of the double transform.
inline Potential project_to_class(const Potential& f, const SampleCloud& a, const SampleCloud& b) {
    auto g = c_transform(f, a, b);
    auto ff = c_transform(g, b, a);
    ff.c_closed = true;
    return ff;
}

inline bool is_c_closed(const Potential& f, const SampleCloud& a, const SampleCloud& b, double tol = kClosedTolerance) {
    auto ff = project_to_class(f, a, b);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(ff.values[i] - f.values[i]) > tol) return false;
    return true;
}

// Convex extension of a c-closed potential on cloud a to its ambient space.
class AmbientExtension {
public:
    AmbientExtension(const Potential& f, const SampleCloud& a, const SampleCloud& b) : other_(&b) {
        if (!f.c_closed) throw Error(Errc::NotClosed, "ambient extension needs a c-closed potential");
        conj_ = c_transform(f, a, b);
    }

    double operator()(const RealVector& y) const { return eval(y, nullptr); }

    double eval(const RealVector& y, std::size_t* arg) const {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t bj = 0;
        for (std::size_t j = 0; j < other_->size(); ++j) {
            double v = dot(y, other_->points[j].x) - conj_.values[j];
            if (v > best) {
                best = v;
                bj = j;
            }
        }
        if (arg) *arg = bj;
        return best;
    }

    const Potential& conjugate() const { return conj_; }

private:
    const SampleCloud* other_;
    Potential conj_;
};

inline double extend_to_ambient(const Potential& f, const SampleCloud& a, const SampleCloud& b, const RealVector& y) {
    return AmbientExtension(f, a, b)(y);
}

// CSV: index,value; rows follow the cloud dump order.
inline std::string potential_to_csv(const Potential& f) {
    std::string out = "index,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) out += std::to_string(i) + "," + format_real(f.values[i]) + "\n";
    return out;
}

inline Potential potential_from_csv(const std::string& text, const SampleCloud& cloud, const std::string& source = "<potential>") {
    std::istringstream in(text);
    std::string line;
    int no = 0;
    Potential f;
    f.side = cloud.side;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || no == 1) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(source, no, "value", "expected 'index,value'");
        std::size_t idx = 0;
        double v = 0;
        try {
            idx = std::stoul(line.substr(0, comma));
            v = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError(source, no, "value", "malformed number");
        }
        if (idx != f.values.size()) throw ParseError(source, no, "index", "expected index " + std::to_string(f.values.size()));
        f.values.push_back(v);
    }
    if (f.values.size() != cloud.size())
        throw ParseError(source, no, "index", "potential has " + std::to_string(f.values.size()) + " rows, cloud has " + std::to_string(cloud.size()));
    return f;
}

} // namespace rvp
