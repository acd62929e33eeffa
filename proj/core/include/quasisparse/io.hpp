#pragma once

#include <memory>
#include <optional>
#include <string>

#include "quasisparse/experiments.hpp"
#include "quasisparse/solvers.hpp"

namespace quasisparse {

// Shortest decimal form that round-trips the exact double (std::to_chars).
std::string format_double(double v);

// Operator documents. Shape: {"type": "log_shift"|"linear", "m", "n",
// "a1" (row-major), and for log_shift "eta", "x0", "a2_all_ones": true}.
// Keys are emitted sorted and doubles in shortest round-trip form, so
// serialize(parse(s)) == s for any document this module produced.
std::string operator_to_json(const QuasiLinearOperator& op);
std::unique_ptr<QuasiLinearOperator> operator_from_json(const std::string& text);

// Measurement document: {"b": [...], "x_true": [...] (optional)}.
struct SignalDocument {
  DenseVector b;
  std::optional<DenseVector> x_true;
};
std::string signal_to_json(const SignalDocument& doc);
SignalDocument signal_from_json(const std::string& text);

// Recovery result plus grading context, when known.
struct ResultDocument {
  Algorithm algorithm = Algorithm::IFTA;
  RecoveryResult result;
  std::optional<double> relative_error;
  std::optional<std::uint64_t> seed;
  std::optional<int> sparsity_prior;
};
std::string result_to_json(const ResultDocument& doc);
ResultDocument result_from_json(const std::string& text);

// One iteration-trace line (JSONL; no trailing newline). Keys: k, lambda,
// mu, nnz, regime, rel_change, residual_norm, t_star.
std::string trace_line(const IterationRecord& rec);

// Sweep outputs. CSV columns:
// algorithm,r,success_rate,mean_relative_error,mean_iterations
std::string sweep_to_csv(const SweepReport& report);
std::string sweep_to_json(const SweepReport& report);

}  // namespace quasisparse
