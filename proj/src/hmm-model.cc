// src/hmm-model.cc

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

#include "rdln/hmm-model.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "rdln/rng.h"

namespace rdln {

namespace {

constexpr double kMinMeanSeparation = 1.0;
constexpr double kRowSumTol = 1e-9;

// Sampling scale for emission means; grown when rejection stalls so that
// tightly packed requests (many pdfs in few dimensions) still terminate.
constexpr double kMeanScale = 0.7;

void AppendVector(std::ostringstream *os, const Eigen::VectorXd &v) {
  for (Eigen::Index i = 0; i < v.size(); i++) {
    if (i > 0) *os << ' ';
    *os << Format("%.17g", v[i]);
  }
}

std::vector<double> ParseNumbers(const std::string &line, int line_no,
                                 const std::string &name) {
  std::istringstream iss(line);
  std::vector<double> out;
  std::string tok;
  while (iss >> tok) {
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception &) {
      throw IoError(Format("%s: line %d: bad number '%s'", name.c_str(),
                           line_no, tok.c_str()));
    }
  }
  return out;
}

std::string GetLineOrThrow(std::istream &in, int *line_no,
                           const std::string &name, const char *what) {
  std::string line;
  if (!std::getline(in, line))
    throw IoError(Format("%s: line %d: unexpected end of file, expected %s",
                         name.c_str(), *line_no + 1, what));
  (*line_no)++;
  return line;
}

}  // namespace

HmmModel BuildHmm(int num_phones, int states_per_phone, int feature_dim,
                  double self_loop_prob, std::uint64_t seed) {
  if (num_phones < 1 || states_per_phone < 1 || feature_dim < 1)
    throw ParamError(Format(
        "BuildHmm: counts must be >= 1 (got phones=%d states=%d dim=%d)",
        num_phones, states_per_phone, feature_dim));
  if (!(self_loop_prob > 0.0 && self_loop_prob < 1.0))
    throw ParamError(Format("BuildHmm: self_loop_prob must be in (0,1), got %g",
                            self_loop_prob));

  HmmModel hmm;
  hmm.num_phones = num_phones;
  hmm.states_per_phone = states_per_phone;
  hmm.feature_dim = feature_dim;
  const int n = hmm.NumPdfs();

  hmm.transitions = Eigen::MatrixXd::Zero(n, n);
  for (int pdf = 0; pdf < n; pdf++) {
    hmm.transitions(pdf, pdf) += self_loop_prob;
    if (!hmm.IsPhoneFinal(pdf)) {
      hmm.transitions(pdf, pdf + 1) += 1.0 - self_loop_prob;
    } else {
      double share = (1.0 - self_loop_prob) / num_phones;
      for (int phone = 0; phone < num_phones; phone++)
        hmm.transitions(pdf, hmm.EntryPdf(phone)) += share;
    }
  }

  hmm.initial_probs = Eigen::VectorXd::Zero(n);
  for (int phone = 0; phone < num_phones; phone++)
    hmm.initial_probs[hmm.EntryPdf(phone)] = 1.0 / num_phones;

  SplitMix64 rng(seed);
  hmm.means.resize(n, feature_dim);
  for (int pdf = 0; pdf < n; pdf++) {
    double scale = kMeanScale;
    int attempts = 0;
    for (;;) {
      Eigen::VectorXd cand(feature_dim);
      for (int d = 0; d < feature_dim; d++)
        cand[d] = scale * rng.NextGaussian();
      bool ok = true;
      for (int other = 0; other < pdf && ok; other++)
        if ((cand.transpose() - hmm.means.row(other)).norm() <
            kMinMeanSeparation)
          ok = false;
      if (ok) {
        hmm.means.row(pdf) = cand.transpose();
        break;
      }
      if (++attempts % 200 == 0) scale *= 1.5;
    }
  }
  hmm.variances.resize(n, feature_dim);
  for (int pdf = 0; pdf < n; pdf++)
    for (int d = 0; d < feature_dim; d++)
      hmm.variances(pdf, d) = rng.NextInRange(0.5, 1.5);

  ValidateHmm(hmm);
  return hmm;
}

void ValidateHmm(const HmmModel &hmm) {
  const int n = hmm.NumPdfs();
  if (hmm.num_phones < 1 || hmm.states_per_phone < 1 || hmm.feature_dim < 1)
    throw ParamError("HmmModel: counts must be >= 1");
  if (hmm.transitions.rows() != n || hmm.transitions.cols() != n ||
      hmm.initial_probs.size() != n || hmm.means.rows() != n ||
      hmm.variances.rows() != n || hmm.means.cols() != hmm.feature_dim ||
      hmm.variances.cols() != hmm.feature_dim)
    throw ParamError("HmmModel: inconsistent dimensions");
  for (int k = 0; k < n; k++) {
    double row_sum = 0.0;
    for (int j = 0; j < n; j++) {
      double t = hmm.transitions(k, j);
      if (t < 0.0 || t > 1.0)
        throw ParamError(
            Format("HmmModel: T(%d,%d)=%g outside [0,1]", k, j, t));
      bool allowed = (j == k) ||
                     (!hmm.IsPhoneFinal(k) && j == k + 1) ||
                     (hmm.IsPhoneFinal(k) && j % hmm.states_per_phone == 0);
      if (!allowed && t != 0.0)
        throw ParamError(
            Format("HmmModel: T(%d,%d)=%g breaks left-to-right topology", k,
                   j, t));
      row_sum += t;
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol)
      throw ParamError(
          Format("HmmModel: row %d of T sums to %.17g", k, row_sum));
  }
  if (std::abs(hmm.initial_probs.sum() - 1.0) > kRowSumTol)
    throw ParamError(Format("HmmModel: initial_probs sums to %.17g",
                            hmm.initial_probs.sum()));
  for (int k = 0; k < n; k++)
    if (hmm.initial_probs[k] < 0.0)
      throw ParamError(Format("HmmModel: initial_probs[%d] negative", k));
  if (!(hmm.variances.array() > 0.0).all())
    throw ParamError("HmmModel: variances must be strictly positive");
}

Eigen::VectorXd EmissionLogLik(const HmmModel &hmm,
                               const Eigen::VectorXd &frame) {
  if (frame.size() != hmm.feature_dim)
    throw ParamError(Format("EmissionLogLik: frame dim %d != feature_dim %d",
                            static_cast<int>(frame.size()), hmm.feature_dim));
  const int n = hmm.NumPdfs();
  const double log_2pi = std::log(2.0 * M_PI);
  Eigen::VectorXd out(n);
  for (int pdf = 0; pdf < n; pdf++) {
    double acc = 0.0;
    for (int d = 0; d < hmm.feature_dim; d++) {
      double var = hmm.variances(pdf, d);
      double diff = frame[d] - hmm.means(pdf, d);
      acc += -0.5 * (log_2pi + std::log(var) + diff * diff / var);
    }
    out[pdf] = acc;
  }
  return out;
}

std::string WriteHmmToString(const HmmModel &hmm) {
  std::ostringstream os;
  os << "hmm v1 " << hmm.num_phones << ' ' << hmm.states_per_phone << ' '
     << hmm.feature_dim << '\n';
  const int n = hmm.NumPdfs();
  for (int k = 0; k < n; k++) {
    AppendVector(&os, hmm.transitions.row(k).transpose());
    os << '\n';
  }
  AppendVector(&os, hmm.initial_probs);
  os << '\n';
  for (int pdf = 0; pdf < n; pdf++) {
    AppendVector(&os, hmm.means.row(pdf).transpose());
    os << " | ";
    AppendVector(&os, hmm.variances.row(pdf).transpose());
    os << '\n';
  }
  return os.str();
}

void WriteHmmFile(const HmmModel &hmm, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("WriteHmmFile: cannot open " + path);
  out << WriteHmmToString(hmm);
  if (!out) throw IoError("WriteHmmFile: write failed for " + path);
}

HmmModel ReadHmm(std::istream &in, const std::string &name) {
  int line_no = 0;
  std::string header = GetLineOrThrow(in, &line_no, name, "header");
  std::istringstream hs(header);
  std::string magic, version;
  HmmModel hmm;
  if (!(hs >> magic >> version >> hmm.num_phones >> hmm.states_per_phone >>
        hmm.feature_dim) ||
      magic != "hmm" || version != "v1")
    throw IoError(Format("%s: line 1: bad header '%s'", name.c_str(),
                         header.c_str()));
  if (hmm.num_phones < 1 || hmm.states_per_phone < 1 || hmm.feature_dim < 1)
    throw IoError(Format("%s: line 1: non-positive counts", name.c_str()));

  const int n = hmm.NumPdfs();
  hmm.transitions.resize(n, n);
  for (int k = 0; k < n; k++) {
    std::string line = GetLineOrThrow(in, &line_no, name, "transition row");
    std::vector<double> row = ParseNumbers(line, line_no, name);
    if (static_cast<int>(row.size()) != n)
      throw IoError(Format("%s: line %d: expected %d transition entries, got %d",
                           name.c_str(), line_no, n,
                           static_cast<int>(row.size())));
    for (int j = 0; j < n; j++) hmm.transitions(k, j) = row[j];
  }
  {
    std::string line = GetLineOrThrow(in, &line_no, name, "initial probs");
    std::vector<double> row = ParseNumbers(line, line_no, name);
    if (static_cast<int>(row.size()) != n)
      throw IoError(Format("%s: line %d: expected %d initial probs, got %d",
                           name.c_str(), line_no, n,
                           static_cast<int>(row.size())));
    hmm.initial_probs.resize(n);
    for (int j = 0; j < n; j++) hmm.initial_probs[j] = row[j];
  }
  hmm.means.resize(n, hmm.feature_dim);
  hmm.variances.resize(n, hmm.feature_dim);
  for (int pdf = 0; pdf < n; pdf++) {
    std::string line = GetLineOrThrow(in, &line_no, name, "emission line");
    std::size_t bar = line.find('|');
    if (bar == std::string::npos)
      throw IoError(Format("%s: line %d: missing '|' separator", name.c_str(),
                           line_no));
    std::vector<double> mean =
        ParseNumbers(line.substr(0, bar), line_no, name);
    std::vector<double> var =
        ParseNumbers(line.substr(bar + 1), line_no, name);
    if (static_cast<int>(mean.size()) != hmm.feature_dim ||
        static_cast<int>(var.size()) != hmm.feature_dim)
      throw IoError(Format("%s: line %d: expected %d mean and %d variance "
                           "entries, got %d and %d",
                           name.c_str(), line_no, hmm.feature_dim,
                           hmm.feature_dim, static_cast<int>(mean.size()),
                           static_cast<int>(var.size())));
    for (int d = 0; d < hmm.feature_dim; d++) {
      hmm.means(pdf, d) = mean[d];
      hmm.variances(pdf, d) = var[d];
    }
  }
  try {
    ValidateHmm(hmm);
  } catch (const ParamError &e) {
    throw IoError(Format("%s: model fails validation: %s", name.c_str(),
                         e.what()));
  }
  return hmm;
}

HmmModel ReadHmmFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("ReadHmmFile: cannot open " + path);
  return ReadHmm(in, path);
}

std::uint64_t HmmFingerprint(const HmmModel &hmm) {
  return Fnv1a64(WriteHmmToString(hmm));
}

StateMaps BuildStateMaps(const HmmModel &hmm) {
  ValidateHmm(hmm);
  const int n = hmm.NumPdfs();
  StateMaps maps;
  maps.num_monophones = hmm.num_phones;
  maps.pdf_to_transition.resize(n);
  maps.pdf_to_monophone.resize(n);
  for (int pdf = 0; pdf < n; pdf++) {
    maps.pdf_to_monophone[pdf] = hmm.PhoneOfPdf(pdf);
    for (int dest = 0; dest < n; dest++) {
      if (hmm.transitions(pdf, dest) > 0.0) {
        int tid = maps.NumTransitions();
        maps.pdf_to_transition[pdf].push_back(tid);
        maps.transition_to_pdf.push_back(pdf);
      }
    }
  }
  return maps;
}

}  // namespace rdln
