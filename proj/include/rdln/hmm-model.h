// include/rdln/hmm-model.h

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

#ifndef RDLN_HMM_MODEL_H_
#define RDLN_HMM_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "rdln/common.h"

namespace rdln {

// Left-to-right HMM with one diagonal-Gaussian emission per pdf.
// Each phone has states_per_phone emitting sub-states; pdf-ids are laid out
// phone-major, so pdf(p, s) = p * states_per_phone + s. A sub-state may
// self-loop or advance to the next sub-state of its phone; a phone-final
// sub-state re-enters the entry state of any phone.
struct HmmModel {
  int num_phones = 0;
  int states_per_phone = 0;
  int feature_dim = 0;
  Eigen::MatrixXd transitions;    // num_pdfs x num_pdfs, rows sum to 1
  Eigen::VectorXd initial_probs;  // num_pdfs, sums to 1
  Eigen::MatrixXd means;          // num_pdfs x feature_dim
  Eigen::MatrixXd variances;      // num_pdfs x feature_dim, strictly positive

  int NumPdfs() const { return num_phones * states_per_phone; }
  int EntryPdf(int phone) const { return phone * states_per_phone; }
  int PhoneOfPdf(int pdf) const { return pdf / states_per_phone; }
  bool IsPhoneFinal(int pdf) const {
    return pdf % states_per_phone == states_per_phone - 1;
  }
};

// Deterministically builds a ground-truth model from the seed. Cross-phone
// transition mass (1 - self_loop_prob at phone-final states) is split
// uniformly over the phone entry states; initial probability is uniform over
// entry states. Emission means are rejection-sampled from the seeded stream
// until every pair is at least 1.0 apart; the draw order is fixed (all mean
// candidates pdf by pdf, then all variances pdf by pdf) so identical
// arguments always yield an identical model.
HmmModel BuildHmm(int num_phones, int states_per_phone, int feature_dim,
                  double self_loop_prob, std::uint64_t seed);

// Throws ParamError if any structural invariant is violated (row sums,
// initial-prob normalization, variance positivity, topology zeros).
void ValidateHmm(const HmmModel &hmm);

// Log-density of one frame under every pdf's diagonal Gaussian.
Eigen::VectorXd EmissionLogLik(const HmmModel &hmm,
                               const Eigen::VectorXd &frame);

// Text persistence. Header line "hmm v1 <num_phones> <states_per_phone>
// <feature_dim>", then the transition rows, the initial probabilities, and
// one "mean... | var..." line per pdf, all with 17 significant digits.
std::string WriteHmmToString(const HmmModel &hmm);
void WriteHmmFile(const HmmModel &hmm, const std::string &path);
HmmModel ReadHmm(std::istream &in, const std::string &name);
HmmModel ReadHmmFile(const std::string &path);

// FNV-1a hash of the canonical text serialization.
std::uint64_t HmmFingerprint(const HmmModel &hmm);

// Maps among the three state-identifier spaces: pdf-ids, transition-ids
// (one per positive arc of the transition matrix, numbered in
// (source pdf, destination pdf) lexicographic order), and monophone-ids.
struct StateMaps {
  std::vector<std::vector<int>> pdf_to_transition;
  std::vector<int> transition_to_pdf;
  std::vector<int> pdf_to_monophone;
  int num_monophones = 0;

  int NumPdfs() const { return static_cast<int>(pdf_to_transition.size()); }
  int NumTransitions() const {
    return static_cast<int>(transition_to_pdf.size());
  }
};

StateMaps BuildStateMaps(const HmmModel &hmm);

}  // namespace rdln

#endif  // RDLN_HMM_MODEL_H_
