#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace maskcheck {

/// Outcome of one property check.
///
/// `SampledPass` is what a sampled run reports when it found no
/// counterexample; only an exhaustive run yields `Pass`. `SecondOrderLeak`
/// is the expected outcome of the shared-mask demonstration and is not a
/// first-order failure.
enum class Verdict { Pass, Fail, SampledPass, Inconclusive, SecondOrderLeak };

enum class Mode { Exhaustive, Sampled };

std::string_view to_string(Verdict v);
std::string_view to_string(Mode m);
Verdict verdict_from_string(std::string_view s);
Mode mode_from_string(std::string_view s);

/// Pass or SampledPass.
bool holds(Verdict v);

/// Named free variables of a counterexample, in the order they were bound.
class Witness {
public:
    Witness& set(std::string name, std::uint64_t value);
    std::optional<std::uint64_t> get(std::string_view name) const;
    std::uint64_t at(std::string_view name) const;
    const std::vector<std::pair<std::string, std::uint64_t>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    friend bool operator==(const Witness&, const Witness&) = default;

private:
    std::vector<std::pair<std::string, std::uint64_t>> entries_;
};

struct CheckReport {
    std::string property_name;
    Verdict verdict = Verdict::Inconclusive;
    Mode mode = Mode::Exhaustive;
    std::optional<Witness> witness;
    std::uint64_t contexts_checked = 0;
    std::optional<std::uint64_t> seed;
    std::chrono::nanoseconds elapsed{0};
    std::vector<std::string> notes;
};

/// Knobs shared by every checker.
struct CheckOptions {
    /// Largest domain enumerated exhaustively; larger domains are sampled.
    std::uint64_t max_exhaustive = std::uint64_t{1} << 20;
    /// Number of draws in sampled mode.
    std::uint64_t samples = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Measures wall time into a report on scope exit.
class ScopedTimer {
public:
    explicit ScopedTimer(CheckReport& report)
        : report_(report), start_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        report_.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - start_);
    }
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    CheckReport& report_;
    std::chrono::steady_clock::time_point start_;
};

/// q^exponent, saturating at UINT64_MAX.
std::uint64_t saturating_pow(std::uint64_t q, std::uint64_t exponent);
/// x * y, saturating at UINT64_MAX.
std::uint64_t saturating_mul(std::uint64_t x, std::uint64_t y);

}  // namespace maskcheck
