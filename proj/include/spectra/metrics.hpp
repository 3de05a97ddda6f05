#pragma once

#include <cstddef>
#include <vector>

namespace spectra {

// Fraction of positions where prediction == truth.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths);

struct SignF1 {
  double f1_positive = 0.0;
  double f1_negative = 0.0;
  double macro_f1 = 0.0;  // unweighted mean over the two sign classes
  double micro_f1 = 0.0;  // pooled TP / (TP + (FP + FN) / 2) over them
};

// F1 over the two sign classes (labels 0 = positive, 1 = negative); any
// other predicted label on a true link counts as a miss for its true class
// without crediting either sign class.  0/0 ratios collapse to 0.
SignF1 sign_f1(const std::vector<int>& predictions, const std::vector<int>& truths);

// Rank-based ROC-AUC of scores for the binary ground truth (1 = positive
// class); ties contribute 1/2.  Degenerate single-class input returns 0.5.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& is_positive);

double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);  // population (n) form

}  // namespace spectra
