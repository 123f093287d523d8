// src/decode.cc

// Copyright 2026  RDLN Lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "rdln/decode.h"

#include <cmath>
#include <limits>

namespace rdln {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp(const Eigen::VectorXd &v) {
  double m = kNegInf;
  for (Eigen::Index i = 0; i < v.size(); i++)
    if (v[i] > m) m = v[i];
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); i++) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

Eigen::VectorXd LogVector(const Eigen::VectorXd &v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); i++)
    out[i] = v[i] > 0.0 ? std::log(v[i]) : kNegInf;
  return out;
}

// Log-domain recursion column from a normalized log column; shared by
// TrellisStep and RunTrellis. Throws DecodeError when everything is -inf.
Eigen::VectorXd StepLogColumn(const Eigen::VectorXd &log_prev,
                              const Eigen::VectorXd &log_obs,
                              const Eigen::MatrixXd &log_trans,
                              TrellisMode mode, std::vector<int> *backpointers,
                              int frame_index) {
  const Eigen::Index n = log_trans.rows();
  Eigen::VectorXd out(n);
  if (backpointers != nullptr) backpointers->assign(n, 0);
  Eigen::VectorXd cand(n);
  for (Eigen::Index j = 0; j < n; j++) {
    if (mode == TrellisMode::kSum) {
      for (Eigen::Index k = 0; k < n; k++)
        cand[k] = log_prev[k] + log_trans(k, j);
      out[j] = LogSumExp(cand) + log_obs[j];
    } else {
      double best = kNegInf;
      int best_k = 0;
      for (Eigen::Index k = 0; k < n; k++) {
        double v = log_prev[k] + log_trans(k, j);
        if (v > best) {
          best = v;
          best_k = static_cast<int>(k);
        }
      }
      out[j] = best + log_obs[j];
      if (backpointers != nullptr) (*backpointers)[j] = best_k;
    }
  }
  double z = LogSumExp(out);
  if (z == kNegInf) {
    if (frame_index >= 0)
      throw DecodeError(Format(
          "frame %d: every state path has zero probability", frame_index));
    throw DecodeError("every state path has zero probability");
  }
  return out;
}

int ArgMaxLowest(const Eigen::VectorXd &v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); i++)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace

bool IsValidPosterior(const Posterior &p, double tol) {
  if (p.size() == 0) return false;
  for (Eigen::Index i = 0; i < p.size(); i++)
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) return false;
  return std::abs(p.sum() - 1.0) <= tol;
}

Posterior UniformPosterior(int n) {
  if (n < 1) throw ParamError("UniformPosterior: n must be >= 1");
  return Eigen::VectorXd::Constant(n, 1.0 / n);
}

TrellisStepResult TrellisStep(const Posterior &prev, const Posterior &obs,
                              const Eigen::MatrixXd &transitions,
                              TrellisMode mode, int frame_index) {
  const Eigen::Index n = transitions.rows();
  if (transitions.cols() != n || prev.size() != n || obs.size() != n)
    throw ParamError(Format(
        "TrellisStep: dimension mismatch (T %ldx%ld, prev %ld, obs %ld)",
        static_cast<long>(transitions.rows()),
        static_cast<long>(transitions.cols()), static_cast<long>(prev.size()),
        static_cast<long>(obs.size())));
  TrellisStepResult res;
  std::vector<int> bp;
  Eigen::VectorXd log_col = StepLogColumn(
      LogVector(prev), LogVector(obs), transitions.array().log().matrix(),
      mode, mode == TrellisMode::kMax ? &bp : nullptr, frame_index);
  res.log_norm = LogSumExp(log_col);
  res.out = (log_col.array() - res.log_norm).exp().matrix();
  res.backpointers = std::move(bp);
  return res;
}

double Trellis::TotalLogNorm() const {
  double acc = 0.0;
  for (double z : log_norms) acc += z;
  return acc;
}

Posterior Trellis::Column(int frame) const {
  return log_columns.at(frame).array().exp().matrix();
}

Trellis RunTrellis(const std::vector<Posterior> &obs_seq,
                   const Eigen::MatrixXd &transitions,
                   const Eigen::VectorXd &initial, TrellisMode mode) {
  if (obs_seq.empty()) throw ParamError("RunTrellis: empty observation sequence");
  const Eigen::Index n = transitions.rows();
  if (transitions.cols() != n || initial.size() != n)
    throw ParamError("RunTrellis: dimension mismatch");
  Eigen::MatrixXd log_trans = transitions.array().log().matrix();

  Trellis trellis;
  trellis.mode = mode;
  trellis.log_columns.reserve(obs_seq.size());
  trellis.log_norms.reserve(obs_seq.size());

  Eigen::VectorXd col = LogVector(initial) + LogVector(obs_seq[0]);
  double z = LogSumExp(col);
  if (z == kNegInf)
    throw DecodeError("frame 0: every state path has zero probability");
  col.array() -= z;
  trellis.log_columns.push_back(col);
  trellis.log_norms.push_back(z);
  if (mode == TrellisMode::kMax)
    trellis.backpointers.emplace_back();  // frame 0 has no predecessors

  for (std::size_t i = 1; i < obs_seq.size(); i++) {
    if (obs_seq[i].size() != n)
      throw ParamError(Format("RunTrellis: frame %d has dim %ld, expected %ld",
                              static_cast<int>(i),
                              static_cast<long>(obs_seq[i].size()),
                              static_cast<long>(n)));
    std::vector<int> bp;
    col = StepLogColumn(trellis.log_columns.back(), LogVector(obs_seq[i]),
                        log_trans, mode,
                        mode == TrellisMode::kMax ? &bp : nullptr,
                        static_cast<int>(i));
    z = LogSumExp(col);
    col.array() -= z;
    trellis.log_columns.push_back(col);
    trellis.log_norms.push_back(z);
    if (mode == TrellisMode::kMax) trellis.backpointers.push_back(std::move(bp));
  }
  return trellis;
}

Posterior PredictContextIndependent(const Posterior &prev,
                                    const Eigen::MatrixXd &transitions) {
  return PredictWithTape({prev}, transitions).output;
}

Posterior PredictContextDependent(const std::vector<Posterior> &history,
                                  const Eigen::MatrixXd &transitions,
                                  TrellisMode mode) {
  if (history.empty())
    throw ParamError("PredictContextDependent: history must be non-empty");
  if (mode == TrellisMode::kSum) return PredictWithTape(history, transitions).output;

  // Max mode, linear domain: history[0] seeds the table, later history
  // frames act as observations, and the final transition step has a uniform
  // observation (a constant, removed by the normalizer).
  const Eigen::Index n = transitions.rows();
  Eigen::VectorXd col = history[0];
  for (std::size_t t = 1; t <= history.size(); t++) {
    Eigen::VectorXd u(n);
    for (Eigen::Index j = 0; j < n; j++) {
      double best = 0.0;
      for (Eigen::Index k = 0; k < n; k++) {
        double v = col[k] * transitions(k, j);
        if (v > best) best = v;
      }
      u[j] = best;
    }
    if (t < history.size()) u = u.cwiseProduct(history[t]);
    double s = u.sum();
    if (!(s > 0.0))
      throw DecodeError(Format(
          "history frame %d: every state path has zero probability",
          static_cast<int>(t)));
    col = u / s;
  }
  return col;
}

ViterbiResult ViterbiDecode(const std::vector<Posterior> &obs_seq,
                            const HmmModel &hmm) {
  if (obs_seq.empty()) throw ParamError("ViterbiDecode: empty sequence");
  Trellis trellis = RunTrellis(obs_seq, hmm.transitions, hmm.initial_probs,
                               TrellisMode::kMax);
  const int num_frames = trellis.NumFrames();
  ViterbiResult res;
  res.alignment.resize(num_frames);
  int state = ArgMaxLowest(trellis.log_columns.back());
  res.log_score =
      trellis.TotalLogNorm() + trellis.log_columns.back()[state];
  for (int i = num_frames - 1; i >= 0; i--) {
    res.alignment[i] = state;
    if (i > 0) state = trellis.backpointers[i][state];
  }
  return res;
}

Alignment ForcedAlign(const std::vector<Posterior> &obs_seq,
                      const HmmModel &hmm,
                      const std::vector<int> &transcript) {
  const int num_frames = static_cast<int>(obs_seq.size());
  if (transcript.empty()) throw ParamError("ForcedAlign: empty transcript");
  for (int phone : transcript)
    if (phone < 0 || phone >= hmm.num_phones)
      throw ParamError(Format("ForcedAlign: phone id %d out of range", phone));
  const int states = hmm.states_per_phone;
  const int graph_len = static_cast<int>(transcript.size()) * states;
  if (num_frames < graph_len)
    throw AlignError(Format(
        "ForcedAlign: transcript needs at least %d frames, got %d", graph_len,
        num_frames));

  // pdf of graph position g.
  auto pdf_of = [&](int g) {
    return transcript[g / states] * states + g % states;
  };
  Eigen::MatrixXd log_trans = hmm.transitions.array().log().matrix();

  Eigen::MatrixXd dp =
      Eigen::MatrixXd::Constant(num_frames, graph_len, kNegInf);
  Eigen::MatrixXi from = Eigen::MatrixXi::Zero(num_frames, graph_len);
  auto log_obs = [&](int t, int g) {
    double p = obs_seq[t][pdf_of(g)];
    return p > 0.0 ? std::log(p) : kNegInf;
  };
  dp(0, 0) = log_obs(0, 0);
  for (int t = 1; t < num_frames; t++) {
    for (int g = 0; g < graph_len; g++) {
      // predecessors scanned in ascending graph order: advance, then stay
      double best = kNegInf;
      int best_g = g;
      if (g > 0) {
        double v = dp(t - 1, g - 1) + log_trans(pdf_of(g - 1), pdf_of(g));
        if (v > best) {
          best = v;
          best_g = g - 1;
        }
      }
      {
        double v = dp(t - 1, g) + log_trans(pdf_of(g), pdf_of(g));
        if (v > best) {
          best = v;
          best_g = g;
        }
      }
      if (best != kNegInf) {
        dp(t, g) = best + log_obs(t, g);
        from(t, g) = best_g;
      }
    }
  }
  if (dp(num_frames - 1, graph_len - 1) == kNegInf)
    throw AlignError("ForcedAlign: no feasible path has positive probability");

  Alignment alignment(num_frames);
  int g = graph_len - 1;
  for (int t = num_frames - 1; t >= 0; t--) {
    alignment[t] = pdf_of(g);
    if (t > 0) g = from(t, g);
  }
  return alignment;
}

std::vector<int> AlignToTranscript(const Alignment &alignment,
                                   const StateMaps &maps) {
  std::vector<int> out;
  int prev = -1;
  for (int pdf : alignment) {
    if (pdf < 0 || pdf >= maps.NumPdfs())
      throw ParamError(Format("AlignToTranscript: pdf id %d out of range", pdf));
    int mono = maps.pdf_to_monophone[pdf];
    if (mono != prev) out.push_back(mono);
    prev = mono;
  }
  return out;
}

PredictionTape PredictWithTape(const std::vector<Posterior> &history,
                               const Eigen::MatrixXd &transitions) {
  if (history.empty())
    throw ParamError("PredictWithTape: history must be non-empty");
  PredictionTape tape;
  tape.cols.push_back(history[0]);
  for (std::size_t t = 1; t < history.size(); t++) {
    Eigen::VectorXd w = transitions.transpose() * tape.cols.back();
    Eigen::VectorXd u = w.cwiseProduct(history[t]);
    double s = u.sum();
    if (!(s > 0.0))
      throw DecodeError(Format(
          "history frame %d: every state path has zero probability",
          static_cast<int>(t)));
    tape.ws.push_back(std::move(w));
    tape.sums.push_back(s);
    tape.cols.push_back(u / s);
  }
  tape.final_w = transitions.transpose() * tape.cols.back();
  tape.final_sum = tape.final_w.sum();
  if (!(tape.final_sum > 0.0))
    throw DecodeError("prediction step: every state path has zero probability");
  tape.output = tape.final_w / tape.final_sum;
  return tape;
}

std::vector<Eigen::VectorXd> PredictBackward(
    const std::vector<Posterior> &history, const Eigen::MatrixXd &transitions,
    const PredictionTape &tape, const Eigen::VectorXd &d_output) {
  const std::size_t depth = history.size();
  std::vector<Eigen::VectorXd> d_history(depth);

  // Renormalization backward: y = u / sum(u) gives
  // dL/du = (dL/dy - <dL/dy, y>) / sum(u).
  Eigen::VectorXd d_w =
      (d_output.array() - d_output.dot(tape.output)).matrix() /
      tape.final_sum;
  Eigen::VectorXd d_col = transitions * d_w;
  for (std::size_t t = depth - 1; t >= 1; t--) {
    Eigen::VectorXd d_u =
        (d_col.array() - d_col.dot(tape.cols[t])).matrix() / tape.sums[t - 1];
    d_history[t] = d_u.cwiseProduct(tape.ws[t - 1]);
    Eigen::VectorXd d_wt = d_u.cwiseProduct(history[t]);
    d_col = transitions * d_wt;
  }
  d_history[0] = d_col;
  return d_history;
}

}  // namespace rdln
