#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "maskcheck/report.hpp"

namespace maskcheck::cli {

using Json = nlohmann::ordered_json;

Json witness_json(const Witness& w);
/// Throws std::invalid_argument on anything but an object of unsigned integers.
Witness witness_from_json(const Json& j);

double to_ms(std::chrono::nanoseconds d);

/// One entry of a report's details[] array for a single checker run.
/// `context` holds the fixed parameters the witness is relative to.
Json check_json(const CheckReport& r, Json context = Json::object());

/// The top-level report. Field order is the documented schema order.
struct Envelope {
    std::string property;
    Verdict verdict = Verdict::Pass;
    Mode mode = Mode::Exhaustive;
    std::optional<std::uint64_t> q;
    std::optional<std::uint64_t> k;
    std::optional<std::vector<std::uint64_t>> twiddles;
    std::optional<std::uint64_t> seed;
    std::uint64_t contexts_checked = 0;
    std::optional<Witness> witness;
    std::vector<Json> details;
    std::vector<std::string> notes;
    std::chrono::nanoseconds elapsed{0};

    Json to_json() const;
};

/// Worst of two verdicts: FAIL > INCONCLUSIVE > FAIL-SECOND-ORDER >
/// INCONCLUSIVE-PASS > PASS.
Verdict worse(Verdict x, Verdict y);

/// Accumulates many runs of one checker into a single details[] entry. The
/// first failing run supplies the witness and its context.
class Tally {
public:
    explicit Tally(std::string property) : property_(std::move(property)) {}

    void add(const CheckReport& r, const Json& context = Json::object());
    /// Marks the configurations themselves as drawn at random.
    void mark_sampled(std::uint64_t seed) {
        sampled_ = true;
        seed_ = seed;
    }
    void note(std::string text) { notes_.push_back(std::move(text)); }

    Verdict verdict() const;
    Mode mode() const { return sampled_ ? Mode::Sampled : Mode::Exhaustive; }
    std::uint64_t runs() const { return runs_; }
    std::uint64_t contexts() const { return contexts_; }
    const std::optional<Witness>& witness() const { return witness_; }
    const Json& witness_context() const { return context_; }
    std::chrono::nanoseconds elapsed() const { return elapsed_; }
    Json to_json() const;

private:
    std::string property_;
    Verdict verdict_ = Verdict::Pass;
    bool sampled_ = false;
    std::optional<std::uint64_t> seed_;
    std::uint64_t runs_ = 0;
    std::uint64_t contexts_ = 0;
    std::optional<Witness> witness_;
    Json context_ = Json::object();
    std::vector<std::string> notes_;
    std::chrono::nanoseconds elapsed_{0};
};

/// Sets every "elapsed_ms" in the tree to 0.
void zero_elapsed(Json& j);

/// Fixed-layout text rendering of a report.
std::string render_text(const Json& report);

}  // namespace maskcheck::cli
