#ifndef PERCBRIDGE_POINT_HPP
#define PERCBRIDGE_POINT_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace percbridge {

// Lattice point in Z^d. d is small (1..4 in practice), so a plain vector is fine.
using Point = std::vector<int64_t>;
// Point in R^d.
using VecD = std::vector<double>;

inline int64_t dot(const Point& a, const Point& b) {
    int64_t s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const VecD& a, const VecD& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const VecD& a, const Point& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * static_cast<double>(b[i]);
    return s;
}

inline Point add(const Point& a, const Point& b) {
    Point r(a);
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

inline Point sub(const Point& a, const Point& b) {
    Point r(a);
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}

inline Point scale(const Point& a, int64_t c) {
    Point r(a);
    for (auto& x : r) x *= c;
    return r;
}

inline double norm2(const Point& a) {
    double s = 0;
    for (auto x : a) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

inline double norm2(const VecD& a) { return std::sqrt(dot(a, a)); }

inline VecD to_vecd(const Point& a) {
    VecD r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = static_cast<double>(a[i]);
    return r;
}

inline bool is_zero(const Point& a) {
    for (auto x : a)
        if (x != 0) return false;
    return true;
}

inline std::string format_point(const Point& a, char sep = ' ') {
    std::string s;
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(a[i]);
    }
    return s;
}

struct PointHash {
    size_t operator()(const Point& p) const {
        uint64_t h = 0x9E3779B97F4A7C15ULL ^ (p.size() * 0xBF58476D1CE4E5B9ULL);
        for (auto x : p) {
            uint64_t z = static_cast<uint64_t>(x) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            h ^= z ^ (z >> 27);
        }
        return static_cast<size_t>(h);
    }
};

} // namespace percbridge

#endif
