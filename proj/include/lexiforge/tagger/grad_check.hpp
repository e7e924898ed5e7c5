#pragma once

// Central finite-difference check of the analytic gradients, in eval mode
// (no dropout). Instantiate the model with long double: in double the
// rounding of the loss swamps the smallest gradients.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexiforge/rng.hpp"
#include "lexiforge/tagger/model.hpp"

namespace lexiforge::tagger {

struct GroupCheck {
  std::string name;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
  double max_rel_error = 0;
};

struct GradCheckReport {
  std::vector<GroupCheck> groups;
  double max_rel_error = 0;
};

struct GradCheckOptions {
  double epsilon = 1e-4;
  std::size_t coords_per_group = 20;
  // Relative error is |a - n| / max(|a|, |n|, floor): the floor keeps
  // coordinates whose true gradient is zero from reporting rounding noise.
  double floor = 1e-8;
  std::uint64_t seed = 1;
  int kink_retries = 3;  // step sizes tried: epsilon, epsilon/10, ...
};

inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

template <class S>
GradCheckReport grad_check(TaggerModel<S>& model, const Example& sample, const GradCheckOptions& opt = {}) {
  using Prepared = typename TaggerModel<S>::Prepared;
  const Prepared prep = model.prepare(sample);
  const std::vector<const Prepared*> batch = {&prep};

  model.zero_grad();
  model.loss_and_grad(batch, Mode::eval, nullptr);

  // ReLU on/off pattern; a perturbation that flips it straddles a kink where
  // the loss is not differentiable, so the step shrinks and, failing that, the coordinate is redrawn.
  auto pattern = [&](const CnnCache<S>& c) {
    std::vector<bool> bits;
    if (!uses_cnn(model.kind())) return bits;
    auto push = [&](const Matrix<S>& a) {
      for (Eigen::Index i = 0; i < a.size(); ++i) bits.push_back(a.data()[i] > S(0));
    };
    push(c.act_a);
    push(c.act_b);
    for (const auto& a : c.deep_act) push(a);
    return bits;
  };
  CnnCache<S> cache;
  model.loss(batch, &cache);
  const auto base_pattern = pattern(cache);

  // Rows that can influence this sample's loss.
  std::set<std::size_t> token_rows(prep.ids.begin(), prep.ids.end());
  std::set<std::size_t> feature_rows;
  for (const auto& f : prep.feats) feature_rows.insert(f.begin(), f.end());

  Rng rng(opt.seed);
  GradCheckReport report;
  for (auto* p : model.params()) {
    GroupCheck g;
    g.name = p->name;
    std::vector<std::size_t> rows;
    if (p->name == "cnn.embed") rows.assign(token_rows.begin(), token_rows.end());
    else if (p->name == "linear.w") rows.assign(feature_rows.begin(), feature_rows.end());
    else for (Eigen::Index r = 0; r < p->value.rows(); ++r) rows.push_back(static_cast<std::size_t>(r));
    const auto cols = static_cast<std::size_t>(p->value.cols());
    std::vector<std::size_t> coords;
    for (auto r : rows) {
      for (std::size_t c = 0; c < cols; ++c) coords.push_back(r * cols + c);
    }
    shuffle(coords, rng);

    for (std::size_t next = 0; next < coords.size() && g.checked < opt.coords_per_group; ++next) {
      S& x = p->value.data()[coords[next]];
      const S saved = x;
      // Near a kink, shrink the step until neither side crosses it.
      std::optional<S> numeric_s;
      S h = static_cast<S>(opt.epsilon);
      for (int attempt = 0; attempt < opt.kink_retries && !numeric_s; ++attempt, h /= 10) {
        x = saved + h;
        const S up = model.loss(batch, &cache);
        const bool kink_up = pattern(cache) != base_pattern;
        x = saved - h;
        const S down = model.loss(batch, &cache);
        const bool kink_down = pattern(cache) != base_pattern;
        x = saved;
        if (!kink_up && !kink_down) numeric_s = (up - down) / (2 * h);
      }
      if (!numeric_s) {
        ++g.skipped_kinks;
        continue;
      }
      const auto numeric = static_cast<double>(*numeric_s);
      const double analytic = static_cast<double>(p->grad.data()[coords[next]]);
      g.max_rel_error = std::max(g.max_rel_error, relative_error(analytic, numeric, opt.floor));
      ++g.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, g.max_rel_error);
    report.groups.push_back(g);
  }
  return report;
}

}  // namespace lexiforge::tagger
