#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitopic/corpus.hpp"
#include "bitopic/matrix.hpp"
#include "bitopic/rng.hpp"

namespace bitopic {

enum class ModelKind { Bilda, Seg, LambdaBilda, LambdaSeg };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Bilda: return "bilda";
    case ModelKind::Seg: return "seg";
    case ModelKind::LambdaBilda: return "lambda-bilda";
    case ModelKind::LambdaSeg: return "lambda-seg";
  }
  return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "bilda") return ModelKind::Bilda;
  if (s == "seg") return ModelKind::Seg;
  if (s == "lambda-bilda") return ModelKind::LambdaBilda;
  if (s == "lambda-seg") return ModelKind::LambdaSeg;
  throw std::runtime_error("unknown model '" + s + "' (expected bilda, seg, lambda-bilda, lambda-seg)");
}

// Segment-level models resample one topic per segment; word-level models
// resample per word occurrence and ignore segment boundaries.
inline bool segment_level(ModelKind k) { return k == ModelKind::Seg || k == ModelKind::LambdaSeg; }

// Lambda models keep per-language document counters bound by per-pair lambda;
// the others share one joint counter per pair.
inline bool uses_lambda(ModelKind k) { return k == ModelKind::LambdaBilda || k == ModelKind::LambdaSeg; }

struct ModelConfig {
  ModelKind kind = ModelKind::Bilda;
  int32_t topics = 0;
  double alpha = 0.0;  // 0 means unset: resolved to 1/topics
  double beta = 0.01;
  int32_t train_iters = 200;
  int32_t infer_iters = 100;
  uint64_t seed = 0;

  void resolve_defaults() {
    if (alpha == 0.0 && topics > 0) alpha = 1.0 / static_cast<double>(topics);
  }

  void validate() const {
    if (topics < 2) throw std::runtime_error("topics must be at least 2");
    if (!(alpha > 0.0)) throw std::runtime_error("alpha must be positive");
    if (!(beta > 0.0)) throw std::runtime_error("beta must be positive");
    if (train_iters < 1) throw std::runtime_error("train_iters must be at least 1");
    if (infer_iters < 1) throw std::runtime_error("infer_iters must be at least 1");
  }
};

// Collapsed state of one model over one corpus. psi counts word assignments
// per topic and language; omega counts words of each pair per topic, either
// jointly over both languages or split per language for the lambda models.
// Assignments carry one topic per unit, where a unit is one word occurrence
// (word-level kinds) or one segment (segment-level kinds).
struct ModelState {
  ModelConfig config;
  Matrix<int32_t> psi_l1;
  Matrix<int32_t> psi_l2;
  std::vector<int64_t> rowsum_l1;
  std::vector<int64_t> rowsum_l2;
  Matrix<int32_t> omega;     // pairs x K, joint counter (bilda, seg)
  Matrix<int32_t> omega_l1;  // pairs x K, per-language counters (lambda models)
  Matrix<int32_t> omega_l2;
  std::vector<std::vector<int32_t>> z_l1;  // per pair, one topic per unit
  std::vector<std::vector<int32_t>> z_l2;
  std::vector<double> lambdas;  // per pair (lambda models), else empty
  Rng rng;

  const Matrix<int32_t>& psi(int lang) const { return lang == 0 ? psi_l1 : psi_l2; }
  Matrix<int32_t>& psi(int lang) { return lang == 0 ? psi_l1 : psi_l2; }
  const std::vector<int64_t>& rowsum(int lang) const { return lang == 0 ? rowsum_l1 : rowsum_l2; }
  std::vector<int64_t>& rowsum(int lang) { return lang == 0 ? rowsum_l1 : rowsum_l2; }
  const Matrix<int32_t>& omega_lang(int lang) const { return lang == 0 ? omega_l1 : omega_l2; }
  Matrix<int32_t>& omega_lang(int lang) { return lang == 0 ? omega_l1 : omega_l2; }
  const std::vector<std::vector<int32_t>>& z(int lang) const { return lang == 0 ? z_l1 : z_l2; }
  std::vector<std::vector<int32_t>>& z(int lang) { return lang == 0 ? z_l1 : z_l2; }

  friend bool operator==(const ModelState& a, const ModelState& b) {
    return a.psi_l1 == b.psi_l1 && a.psi_l2 == b.psi_l2 && a.rowsum_l1 == b.rowsum_l1 &&
           a.rowsum_l2 == b.rowsum_l2 && a.omega == b.omega && a.omega_l1 == b.omega_l1 &&
           a.omega_l2 == b.omega_l2 && a.z_l1 == b.z_l1 && a.z_l2 == b.z_l2 &&
           a.lambdas == b.lambdas && a.rng == b.rng;
  }
};

// Posterior-mean point estimates from a collapsed state. For the shared-theta
// kinds theta_l1 and theta_l2 hold the same rows, so consumers can always
// index by language.
struct TopicEstimates {
  Matrix<double> phi_l1;   // K x V_l1, rows sum to 1
  Matrix<double> phi_l2;   // K x V_l2
  Matrix<double> theta_l1;  // pairs x K
  Matrix<double> theta_l2;
  bool shared_theta = true;

  const Matrix<double>& phi(int lang) const { return lang == 0 ? phi_l1 : phi_l2; }
  const Matrix<double>& theta(int lang) const { return lang == 0 ? theta_l1 : theta_l2; }
};

}  // namespace bitopic
