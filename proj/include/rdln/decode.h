// include/rdln/decode.h

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

#ifndef RDLN_DECODE_H_
#define RDLN_DECODE_H_

#include <vector>

#include <Eigen/Core>

#include "rdln/common.h"
#include "rdln/hmm-model.h"

namespace rdln {

// A probability vector over pdf states; entries nonnegative, sums to 1.
using Posterior = Eigen::VectorXd;

// One pdf-id per frame.
using Alignment = std::vector<int>;

bool IsValidPosterior(const Posterior &p, double tol = 1e-9);
Posterior UniformPosterior(int n);

// Sum mode accumulates over predecessors (forward recursion); max mode keeps
// the single best predecessor (Viterbi recursion). Predecessor ties in max
// mode break toward the lowest state index.
enum class TrellisMode { kSum, kMax };

struct TrellisStepResult {
  Posterior out;                   // renormalized column
  std::vector<int> backpointers;   // filled in max mode only
  double log_norm;                 // log of the normalizer removed here
};

// One recursion step: out_j is proportional to
// (sum_k or max_k of prev_k * T(k,j)) * obs_j, computed in log domain and
// renormalized to sum 1. Throws DecodeError when every entry underflows to
// zero probability; frame_index, when nonnegative, is quoted in the message.
TrellisStepResult TrellisStep(const Posterior &prev, const Posterior &obs,
                              const Eigen::MatrixXd &transitions,
                              TrellisMode mode, int frame_index = -1);

// Frame-by-frame forward/Viterbi table. Columns are stored as normalized
// log probabilities; per-frame normalizers are kept so unnormalized path
// scores can be reconstructed exactly.
struct Trellis {
  TrellisMode mode = TrellisMode::kSum;
  std::vector<Eigen::VectorXd> log_columns;
  std::vector<std::vector<int>> backpointers;  // empty in sum mode
  std::vector<double> log_norms;

  int NumFrames() const { return static_cast<int>(log_columns.size()); }
  // Sum of the per-frame normalizers. In sum mode this is the log of the
  // total probability mass summed over all state paths.
  double TotalLogNorm() const;
  Posterior Column(int frame) const;
};

// Runs the recursion over a whole observation sequence, seeding frame 0
// with initial(j) * obs_0(j).
Trellis RunTrellis(const std::vector<Posterior> &obs_seq,
                   const Eigen::MatrixXd &transitions,
                   const Eigen::VectorXd &initial, TrellisMode mode);

// Language-level prediction of the next frame's state probabilities:
// out_j = sum_k prev_k * T(k,j), renormalized. Equivalent to a trellis step
// whose current-frame observation is uniform.
Posterior PredictContextIndependent(const Posterior &prev,
                                    const Eigen::MatrixXd &transitions);

// Runs the trellis over the history (history[0] is taken as the first
// column directly) and finishes with one transition step under a uniform
// current-frame observation. For a length-1 history this is exactly
// PredictContextIndependent(history[0]), bit for bit.
Posterior PredictContextDependent(const std::vector<Posterior> &history,
                                  const Eigen::MatrixXd &transitions,
                                  TrellisMode mode = TrellisMode::kSum);

struct ViterbiResult {
  Alignment alignment;
  double log_score;  // log probability of the best path, unnormalized
};

// Globally best state path via max-mode trellis and backtrace. Ties break
// toward the lowest state index, both per step and at the final frame.
ViterbiResult ViterbiDecode(const std::vector<Posterior> &obs_seq,
                            const HmmModel &hmm);

// Best path constrained to traverse the transcript's phones in order,
// visiting every sub-state of every phone at least once. The path starts at
// the first phone's entry sub-state and ends at the last phone's final
// sub-state; the initial-state prior is a constant over feasible paths and
// is left out of the score. Throws AlignError when the transcript needs
// more frames than are available or no feasible path has positive
// probability.
Alignment ForcedAlign(const std::vector<Posterior> &obs_seq,
                      const HmmModel &hmm,
                      const std::vector<int> &transcript);

// Maps each pdf to its monophone and collapses consecutive duplicates.
std::vector<int> AlignToTranscript(const Alignment &alignment,
                                   const StateMaps &maps);

// Sum-mode prediction with enough intermediate state kept to backpropagate
// through it. Linear domain; used by the auxiliary training objective.
struct PredictionTape {
  std::vector<Eigen::VectorXd> cols;  // P_0 .. P_{d-1}, normalized
  std::vector<Eigen::VectorXd> ws;    // transition transforms, steps 1..d-1
  std::vector<double> sums;           // normalizers, steps 1..d-1
  Eigen::VectorXd final_w;
  double final_sum = 0.0;
  Posterior output;
};

PredictionTape PredictWithTape(const std::vector<Posterior> &history,
                               const Eigen::MatrixXd &transitions);

// Given dL/d(output), returns dL/d(history[t]) for every history frame.
std::vector<Eigen::VectorXd> PredictBackward(
    const std::vector<Posterior> &history, const Eigen::MatrixXd &transitions,
    const PredictionTape &tape, const Eigen::VectorXd &d_output);

}  // namespace rdln

#endif  // RDLN_DECODE_H_
