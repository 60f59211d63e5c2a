#include "factorgroup/ospe.hpp"

#include "factorgroup/refit.hpp"

namespace factorgroup {
namespace {

std::string normalize_month(const std::string& text) {
  if (text.size() == 7 && text[4] == '-') {
    normalize_date(text + "-01");
    return text;
  }
  if (text.size() == 6) {
    return normalize_date(text + "01").substr(0, 7);
  }
  throw Error(ErrorCode::ParseError, "unrecognized month '" + text + "' (want YYYY-MM)");
}

}  // namespace

std::string to_string(OspeMethod method) {
  return method == OspeMethod::PPCA ? "PPCA" : "PCA_TW";
}

double monthly_ospe(const Eigen::Ref<const Matrix>& x_eval, const Eigen::Ref<const Matrix>& loadings) {
  if (x_eval.rows() == 0) throw Error(ErrorCode::EmptyMonth, "no evaluation rows");
  const Matrix scores = refit_factors(x_eval, loadings);
  const Matrix residual = x_eval - scores * loadings.transpose();
  return residual.squaredNorm() /
         (static_cast<double>(x_eval.cols()) * static_cast<double>(x_eval.rows()));
}

std::vector<std::string> month_range(const std::string& first_month, const std::string& last_month) {
  const std::string first = normalize_month(first_month);
  const std::string last = normalize_month(last_month);
  if (last < first) throw Error(ErrorCode::InvalidArgument, "month range is reversed");
  std::vector<std::string> months;
  int y = std::stoi(first.substr(0, 4));
  int m = std::stoi(first.substr(5, 2));
  while (true) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", y, m);
    months.emplace_back(buf);
    if (months.back() == last) break;
    if (++m == 13) {
      m = 1;
      ++y;
    }
  }
  return months;
}

OspeReport ospe_rolling(const Panel& panel, const std::string& train_start,
                        const std::string& train_end, const std::vector<std::string>& eval_months,
                        OspeMethod method, const PipelineOptions& options) {
  const std::string start = normalize_date(train_start);
  const std::string end = normalize_date(train_end);
  if (end < start) throw Error(ErrorCode::InvalidArgument, "training window is reversed");
  const auto& dates = panel.time_labels();

  std::vector<Index> window;
  for (std::size_t t = 0; t < dates.size(); ++t) {
    if (dates[t] >= start && dates[t] <= end) window.push_back(static_cast<Index>(t));
  }

  PipelineOptions fit_options = options;
  if (method == OspeMethod::PCA_TW) fit_options.lambda = 0.0;

  OspeReport report;
  report.method = method;
  std::string previous = end.substr(0, 7);
  for (const auto& raw_month : eval_months) {
    const std::string month = normalize_month(raw_month);
    if (month <= previous) {
      throw Error(ErrorCode::InvalidArgument,
                  "evaluation month " + month + " does not follow the training window");
    }
    previous = month;
    std::vector<Index> eval;
    for (std::size_t t = 0; t < dates.size(); ++t) {
      if (dates[t].compare(0, 7, month) == 0) eval.push_back(static_cast<Index>(t));
    }
    if (eval.empty()) throw Error(ErrorCode::EmptyMonth, "no rows dated in " + month);
    if (window.size() < 2) {
      throw Error(ErrorCode::InsufficientRows, "training window before " + month + " is empty");
    }

    const Panel train = panel.rows(window);
    const auto [scaled, params] = standardize(train);
    const GroupedModel model = fit_grouped_model(scaled.values(), fit_options);
    const Matrix x_eval = apply_standardization(panel.rows(eval).values(), params);

    report.months.push_back(month);
    report.ospe.push_back(monthly_ospe(x_eval, model.post.loadings));
    report.train_rows.push_back(window.size());
    report.eval_rows.push_back(eval.size());
    report.r_hat.push_back(model.post.r);
    report.k_hat.push_back(model.selection.k_hat);
    report.lambda.push_back(model.initial.lambda);

    window.insert(window.end(), eval.begin(), eval.end());
  }
  return report;
}

}  // namespace factorgroup
