#include "maskcheck/report.hpp"

#include <limits>
#include <stdexcept>

namespace maskcheck {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::SampledPass: return "INCONCLUSIVE-PASS";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
        case Verdict::SecondOrderLeak: return "FAIL-SECOND-ORDER";
    }
    return "INCONCLUSIVE";
}

std::string_view to_string(Mode m) {
    return m == Mode::Exhaustive ? "exhaustive" : "sampled";
}

Verdict verdict_from_string(std::string_view s) {
    for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::SampledPass, Verdict::Inconclusive,
                      Verdict::SecondOrderLeak}) {
        if (to_string(v) == s) return v;
    }
    throw std::invalid_argument("unknown verdict: " + std::string(s));
}

Mode mode_from_string(std::string_view s) {
    if (s == "exhaustive") return Mode::Exhaustive;
    if (s == "sampled") return Mode::Sampled;
    throw std::invalid_argument("unknown mode: " + std::string(s));
}

bool holds(Verdict v) { return v == Verdict::Pass || v == Verdict::SampledPass; }

Witness& Witness::set(std::string name, std::uint64_t value) {
    for (auto& [k, v] : entries_) {
        if (k == name) {
            v = value;
            return *this;
        }
    }
    entries_.emplace_back(std::move(name), value);
    return *this;
}

std::optional<std::uint64_t> Witness::get(std::string_view name) const {
    for (const auto& [k, v] : entries_) {
        if (k == name) return v;
    }
    return std::nullopt;
}

std::uint64_t Witness::at(std::string_view name) const {
    if (auto v = get(name)) return *v;
    throw std::out_of_range("witness has no field '" + std::string(name) + "'");
}

std::uint64_t saturating_pow(std::uint64_t q, std::uint64_t exponent) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t acc = 1;
    for (std::uint64_t i = 0; i < exponent; ++i) {
        if (q != 0 && acc > kMax / q) return kMax;
        acc *= q;
    }
    return acc;
}

std::uint64_t saturating_mul(std::uint64_t x, std::uint64_t y) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (x != 0 && y > kMax / x) return kMax;
    return x * y;
}

}  // namespace maskcheck
