#include "spectra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectra/errors.hpp"

namespace spectra {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths) {
  if (predictions.empty() || predictions.size() != truths.size())
    throw DomainError("accuracy: empty or mismatched inputs");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truths[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

SignF1 sign_f1(const std::vector<int>& predictions, const std::vector<int>& truths) {
  if (predictions.empty() || predictions.size() != truths.size())
    throw DomainError("sign_f1: empty or mismatched inputs");
  double tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int t = truths[i], p = predictions[i];
    for (int c = 0; c < 2; ++c) {
      if (t == c && p == c) tp[c] += 1;
      if (t != c && p == c) fp[c] += 1;
      if (t == c && p != c) fn[c] += 1;
    }
  }
  auto f1_of = [&](int c) {
    const double prec = safe_div(tp[c], tp[c] + fp[c]);
    const double rec = safe_div(tp[c], tp[c] + fn[c]);
    return safe_div(2 * prec * rec, prec + rec);
  };
  SignF1 r;
  r.f1_positive = f1_of(0);
  r.f1_negative = f1_of(1);
  r.macro_f1 = 0.5 * (r.f1_positive + r.f1_negative);
  const double tpp = tp[0] + tp[1], fpp = fp[0] + fp[1], fnp = fn[0] + fn[1];
  r.micro_f1 = safe_div(tpp, tpp + 0.5 * (fpp + fnp));
  return r;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& is_positive) {
  if (scores.empty() || scores.size() != is_positive.size())
    throw DomainError("roc_auc: empty or mismatched inputs");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]]) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("mean of empty sequence");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace spectra
