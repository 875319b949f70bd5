#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace fluctlab {

// Library-level failure with context. Solver/truncation failures carry the
// achieved bound so callers can report it.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class truncation_error : public error {
  public:
    truncation_error(const std::string& what, double achieved)
        : error(what), achieved_defect(achieved) {}
    double achieved_defect;
};

class applicability_error : public error {
  public:
    explicit applicability_error(const std::string& what) : error(what) {}
};

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Shortest round-trip-exact decimal for doubles; used everywhere we emit
// numbers so that rerunning a config reproduces outputs byte for byte.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace fluctlab
