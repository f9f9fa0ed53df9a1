#include "ccil/metrics/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace ccil::metrics {

namespace {

constexpr double kWidth = 640, kPanel = 200, kMargin = 50;

void panel(std::ostringstream& os, int index, const std::string& label, const std::vector<double>& ys,
           const double* rule) {
  const double top = 30 + index * (kPanel + 30);
  double lo = *std::min_element(ys.begin(), ys.end());
  double hi = *std::max_element(ys.begin(), ys.end());
  if (rule) {
    lo = std::min(lo, *rule);
    hi = std::max(hi, *rule);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double plot_w = kWidth - 2 * kMargin;
  auto px = [&](std::size_t i) {
    return kMargin + (ys.size() > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(ys.size() - 1) : 0.0);
  };
  auto py = [&](double y) { return top + kPanel - (y - lo) / (hi - lo) * kPanel; };
  os << "<rect x='" << kMargin << "' y='" << top << "' width='" << plot_w << "' height='" << kPanel
     << "' fill='none' stroke='#999'/>\n";
  os << "<text x='" << kMargin << "' y='" << top - 6 << "' font-size='12'>" << label << " [" << lo << ", " << hi
     << "]</text>\n";
  if (rule) {
    os << "<line x1='" << kMargin << "' x2='" << kMargin + plot_w << "' y1='" << py(*rule) << "' y2='" << py(*rule)
       << "' stroke='#c33' stroke-dasharray='4 3'/>\n";
  }
  os << "<polyline fill='none' stroke='#236' stroke-width='1.5' points='";
  for (std::size_t i = 0; i < ys.size(); ++i) os << px(i) << "," << py(ys[i]) << " ";
  os << "'/>\n";
}

}  // namespace

std::string render_progress_svg(const std::vector<learners::IterationRecord>& records, double expert_cost,
                                const std::string& title) {
  std::ostringstream os;
  const double height = 30 + 3 * (kPanel + 30);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << height << "'>\n";
  os << "<text x='" << kMargin << "' y='16' font-size='14'>" << title << "</text>\n";
  if (records.empty()) {
    os << "</svg>\n";
    return os.str();
  }
  std::vector<double> ret, cost, rate;
  for (const auto& r : records) {
    ret.push_back(r.mean_true_return);
    cost.push_back(r.mean_cost);
    rate.push_back(r.cost_rate);
  }
  panel(os, 0, "return", ret, nullptr);
  panel(os, 1, "cost", cost, &expert_cost);
  panel(os, 2, "cost rate", rate, nullptr);
  os << "</svg>\n";
  return os.str();
}

}  // namespace ccil::metrics
