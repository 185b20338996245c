#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maskcheck/gadget.hpp"
#include "maskcheck/pipeline.hpp"
#include "maskcheck/properties.hpp"
#include "maskcheck/rng.hpp"
#include "maskcheck/scenario.hpp"
#include "report_json.hpp"

namespace maskcheck::cli {

inline constexpr int kExitExpected = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or inputs; reported with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint64_t> parse_list(const std::string& text, char sep = ',');

/// Reads and parses a JSON file; failures are usage errors.
Json read_json_file(const std::string& path);

/// Builds the lane from a twiddle spec: "" picks the NTT schedule when q
/// and k admit one and all-ones otherwise, "ntt-schedule" insists on it,
/// anything else is a comma list whose length fixes k unless k is given.
NttPipeline make_pipeline(Modulus q, std::optional<std::size_t> k, const std::string& twiddles,
                          std::vector<std::string>& notes);

/// "reference" (the default inline path) or "drop-mask".
ButterflyGadget gadget_by_name(const std::string& name);

PipelineInput parse_input(Modulus q, const std::string& text);
Json input_json(const PipelineInput& in);
PipelineInput input_from_json(Modulus q, const Json& j);

/// {"q", "rho", "w": w[s0][s1][r]}.
WireFunctionR table_from_json(const Json& j);
Json table_json(const WireFunctionR& w);

/// Rebuilds a wire function from a report context: "function" is one of
/// identity, reconstruction, mask-share, masked-share, butterfly-wire
/// (with tw, wire, b0, b1) or table.
WireFunctionR wire_function_from_context(const Json& ctx, std::optional<std::uint64_t> q);

/// A named built-in wire function and the context that rebuilds it.
struct NamedWire {
    WireFunctionR fn;
    Json context;
};
NamedWire builtin_wire(const std::string& name, Modulus q, std::uint64_t tw = 1, int wire = 0);

/// Random table instance: q in [1, 7] and rho in [0, 5] unless fixed.
/// Mixes secret-independent tables with ones that read the secret.
NamedWire random_table(CounterRng& rng, std::optional<std::uint64_t> q, std::optional<std::uint64_t> rho);

/// {"joint": [[count per value] per secret], "exact"?, "q"?}.
JointCounts joint_from_json(const Json& j);

/// First (x_prime, value) in row-major order whose share of row x_prime
/// differs from its share of row 0: fields x, x_prime, value, count,
/// count_prime. Empty when every row is proportional to row 0.
std::optional<Witness> dependence_witness(const JointCounts& joint);

std::vector<Zq> random_vector(Modulus q, std::size_t n, std::uint64_t seed, std::uint64_t trial);
/// O(n^2) evaluation of the polynomial at omega^k.
std::vector<Zq> naive_dft(const std::vector<Zq>& x, const Zq& omega);

Json policy_json(const MaskingPolicy& policy);

/// details[] entry for one policy's leakage assessment. PASS when every
/// probe is UNIFORM; the witness is the first SECRET-DEPENDENT probe's.
Json assessment_json(const LeakageAssessment& a, const MaskingPolicy& policy, const SecretPair& secrets,
                     const CheckOptions& opts, bool include_remask_wires);

}  // namespace maskcheck::cli
