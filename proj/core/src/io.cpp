#include "quasisparse/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace quasisparse {

namespace {

using nlohmann::json;

json vector_to_json(const DenseVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

DenseVector vector_from_json(const json& arr) {
  if (!arr.is_array()) {
    throw std::invalid_argument("document: expected an array of numbers");
  }
  DenseVector v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const json& e : arr) {
    v[i++] = e.get<double>();
  }
  return v;
}

json matrix_to_json_row_major(const DenseMatrix& m) {
  json arr = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      arr.push_back(m(i, j));
    }
  }
  return arr;
}

DenseMatrix matrix_from_json_row_major(const json& arr, Index rows,
                                       Index cols) {
  if (!arr.is_array() ||
      arr.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::invalid_argument("operator document: a1 has wrong length");
  }
  DenseMatrix m(rows, cols);
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = arr[k++].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf.data(), res.ptr);
}

std::string operator_to_json(const QuasiLinearOperator& op) {
  json doc;
  if (const auto* ls = dynamic_cast<const LogShiftOperator*>(&op)) {
    doc["type"] = "log_shift";
    doc["m"] = ls->rows();
    doc["n"] = ls->cols();
    doc["eta"] = ls->eta();
    doc["x0"] = vector_to_json(ls->x0());
    doc["a1"] = matrix_to_json_row_major(ls->a1());
    doc["a2_all_ones"] = true;
  } else if (const auto* lin = dynamic_cast<const LinearOperator*>(&op)) {
    doc["type"] = "linear";
    doc["m"] = lin->rows();
    doc["n"] = lin->cols();
    doc["a1"] = matrix_to_json_row_major(lin->a());
  } else {
    throw std::invalid_argument("operator_to_json: unknown operator type");
  }
  return doc.dump();
}

std::unique_ptr<QuasiLinearOperator> operator_from_json(
    const std::string& text) {
  const json doc = json::parse(text);
  const std::string type = doc.at("type").get<std::string>();
  const Index m = doc.at("m").get<Index>();
  const Index n = doc.at("n").get<Index>();
  if (m < 1 || n < 1) {
    throw std::invalid_argument("operator document: bad dimensions");
  }
  DenseMatrix a1 = matrix_from_json_row_major(doc.at("a1"), m, n);
  if (type == "log_shift") {
    if (doc.contains("a2_all_ones") && !doc.at("a2_all_ones").get<bool>()) {
      throw std::invalid_argument(
          "operator document: only the all-ones shift matrix is supported");
    }
    DenseVector x0 = vector_from_json(doc.at("x0"));
    const double eta = doc.at("eta").get<double>();
    return std::make_unique<LogShiftOperator>(std::move(a1), std::move(x0),
                                              eta);
  }
  if (type == "linear") {
    return std::make_unique<LinearOperator>(std::move(a1));
  }
  throw std::invalid_argument("operator document: unknown type '" + type + "'");
}

std::string signal_to_json(const SignalDocument& doc) {
  json j;
  j["b"] = vector_to_json(doc.b);
  if (doc.x_true) {
    j["x_true"] = vector_to_json(*doc.x_true);
  }
  return j.dump();
}

SignalDocument signal_from_json(const std::string& text) {
  const json j = json::parse(text);
  SignalDocument doc;
  doc.b = vector_from_json(j.at("b"));
  if (j.contains("x_true")) {
    doc.x_true = vector_from_json(j.at("x_true"));
  }
  return doc;
}

std::string result_to_json(const ResultDocument& doc) {
  json j;
  j["algorithm"] = algorithm_name(doc.algorithm);
  j["iterations"] = doc.result.iterations;
  j["termination"] = termination_name(doc.result.termination);
  j["final_relative_change"] = doc.result.final_relative_change;
  j["objective"] = doc.result.objective;
  j["residual_norm"] = doc.result.residual_norm;
  j["fixed_point_residual"] = doc.result.fixed_point_residual;
  j["solution"] = vector_to_json(doc.result.solution);
  json trace = json::array();
  for (const LambdaTraceEntry& e : doc.result.lambda_trace) {
    trace.push_back({{"lambda", e.lambda}, {"regime", regime_name(e.regime)}});
  }
  j["lambda_trace"] = std::move(trace);
  if (doc.relative_error) {
    j["relative_error"] = *doc.relative_error;
  }
  if (doc.seed) {
    j["seed"] = *doc.seed;
  }
  if (doc.sparsity_prior) {
    j["sparsity_prior"] = *doc.sparsity_prior;
  }
  return j.dump();
}

ResultDocument result_from_json(const std::string& text) {
  const json j = json::parse(text);
  ResultDocument doc;
  doc.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  doc.result.iterations = j.at("iterations").get<int>();
  doc.result.termination =
      j.at("termination").get<std::string>() == "converged"
          ? Termination::Converged
          : Termination::MaxIter;
  doc.result.final_relative_change =
      j.at("final_relative_change").get<double>();
  doc.result.objective = j.at("objective").get<double>();
  doc.result.residual_norm = j.at("residual_norm").get<double>();
  doc.result.fixed_point_residual = j.at("fixed_point_residual").get<double>();
  doc.result.solution = vector_from_json(j.at("solution"));
  for (const json& e : j.at("lambda_trace")) {
    const std::string regime = e.at("regime").get<std::string>();
    doc.result.lambda_trace.push_back(
        {e.at("lambda").get<double>(), regime == "lambda1"
                                           ? LambdaRegime::Lambda1
                                           : LambdaRegime::Lambda2});
  }
  if (j.contains("relative_error")) {
    doc.relative_error = j.at("relative_error").get<double>();
  }
  if (j.contains("seed")) {
    doc.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("sparsity_prior")) {
    doc.sparsity_prior = j.at("sparsity_prior").get<int>();
  }
  return doc;
}

std::string trace_line(const IterationRecord& rec) {
  json j;
  j["k"] = rec.k;
  j["lambda"] = rec.lambda;
  j["mu"] = rec.mu;
  j["nnz"] = rec.nnz;
  j["regime"] = regime_name(rec.regime);
  j["rel_change"] = rec.rel_change;
  j["residual_norm"] = rec.residual_norm;
  j["t_star"] = rec.threshold;
  return j.dump();
}

std::string sweep_to_csv(const SweepReport& report) {
  std::string out =
      "algorithm,r,success_rate,mean_relative_error,mean_iterations\n";
  for (const LevelSummary& s : report.levels) {
    out += algorithm_name(s.algorithm);
    out += ',';
    out += std::to_string(s.r);
    out += ',';
    out += format_double(s.success_rate);
    out += ',';
    out += format_double(s.mean_relative_error);
    out += ',';
    out += format_double(s.mean_iterations);
    out += '\n';
  }
  return out;
}

std::string sweep_to_json(const SweepReport& report) {
  json spec;
  spec["m"] = report.spec.m;
  spec["n"] = report.spec.n;
  spec["sparsity_levels"] = report.spec.sparsity_levels;
  spec["trials_per_level"] = report.spec.trials_per_level;
  spec["eta"] = report.spec.eta;
  spec["a"] = report.spec.a;
  spec["success_threshold"] = report.spec.success_threshold;
  spec["tol"] = report.spec.tol;
  spec["master_seed"] = report.spec.master_seed;
  spec["epsilon"] = report.spec.epsilon;
  spec["max_iter"] = report.spec.max_iter;
  spec["independent_reference"] = report.spec.independent_reference;
  json algs = json::array();
  for (Algorithm a : report.spec.algorithms) {
    algs.push_back(algorithm_name(a));
  }
  spec["algorithms"] = std::move(algs);

  json levels = json::array();
  for (const LevelSummary& s : report.levels) {
    json level;
    level["algorithm"] = algorithm_name(s.algorithm);
    level["r"] = s.r;
    level["success_rate"] = s.success_rate;
    level["mean_relative_error"] = s.mean_relative_error;
    level["mean_iterations"] = s.mean_iterations;
    json trials = json::array();
    for (const TrialRecord& t : s.trials) {
      json rec;
      rec["trial_index"] = t.trial_index;
      rec["seed"] = t.seed;
      rec["relative_error"] = t.relative_error;
      rec["success"] = t.success;
      rec["iterations"] = t.iterations;
      rec["termination"] = termination_name(t.termination);
      rec["fixed_point_residual"] = t.fixed_point_residual;
      rec["solution_norm"] = t.solution_norm;
      if (t.failed) {
        rec["failed"] = true;
        rec["error"] = t.error;
      }
      trials.push_back(std::move(rec));
    }
    level["trials"] = std::move(trials);
    levels.push_back(std::move(level));
  }

  json doc;
  doc["spec"] = std::move(spec);
  doc["levels"] = std::move(levels);
  return doc.dump();
}

}  // namespace quasisparse
