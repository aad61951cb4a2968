#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spoofsim/errors.h"
#include "spoofsim/metrics.h"

namespace spoofsim::metrics {

void TdcfParams::Validate() const {
  const double costs[] = {cost_miss_asv, cost_fa_asv, cost_miss_cm, cost_fa_cm};
  bool any = false;
  for (double c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("t-DCF cost negative or not finite");
    any = any || c > 0.0;
  }
  if (!any) throw ValidationError("all t-DCF costs are zero");
  const double priors[] = {prior_target, prior_nontarget, prior_spoof};
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("t-DCF prior outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("t-DCF priors do not sum to 1");
}

TdcfParams TdcfParams::FromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("t-DCF config: ") + e.what());
  }
  TdcfParams p;
  auto get = [&](const char* key, double& out) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw FormatError(std::string("t-DCF config lacks numeric '") + key + "'");
    }
    out = j[key].get<double>();
  };
  get("cost_miss_asv", p.cost_miss_asv);
  get("cost_fa_asv", p.cost_fa_asv);
  get("cost_miss_cm", p.cost_miss_cm);
  get("cost_fa_cm", p.cost_fa_cm);
  get("prior_target", p.prior_target);
  get("prior_nontarget", p.prior_nontarget);
  get("prior_spoof", p.prior_spoof);
  p.Validate();
  return p;
}

TdcfParams TdcfParams::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJson(buf.str());
}

std::string TdcfParams::ToJson() const {
  const nlohmann::json j = {{"cost_miss_asv", cost_miss_asv}, {"cost_fa_asv", cost_fa_asv},
                            {"cost_miss_cm", cost_miss_cm},   {"cost_fa_cm", cost_fa_cm},
                            {"prior_target", prior_target},   {"prior_nontarget", prior_nontarget},
                            {"prior_spoof", prior_spoof}};
  return j.dump(2);
}

}  // namespace spoofsim::metrics
