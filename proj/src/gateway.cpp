#include "flowsim/gateway.hpp"

#include <cstdio>
#include <stdexcept>

namespace flowsim {

std::vector<FeatureRecord> filter_features(const FeatureFilter& filter,
                                           const std::vector<FeatureRecord>& batch) {
  std::vector<FeatureRecord> out;
  for (const FeatureRecord& rec : batch)
    if (filter.accepted.count(rec.feature_id)) out.push_back(rec);
  return out;
}

std::optional<ActionValue> ContextDb::update(const FeatureRecord& rec) {
  const auto thres_it = thres_.find(rec.feature_id);
  if (thres_it == thres_.end())
    throw std::out_of_range("unknown-feature: no threshold for feature " +
                            std::to_string(rec.feature_id));
  const double thres = thres_it->second;

  const auto stored_it = stored_.find(rec.feature_id);
  if (stored_it != stored_.end() && stored_it->second == rec.data_value)
    return std::nullopt;  // duplicate of the stored value: no store, no action

  const bool exceeds = rec.data_value > thres;
  std::optional<bool> prev_exceeds;
  if (stored_it != stored_.end()) prev_exceeds = stored_it->second > thres;
  stored_[rec.feature_id] = rec.data_value;

  if (exceeds || (prev_exceeds && *prev_exceeds != exceeds)) {
    ActionValue action{rec.feature_id, rec.data_value, thres, exceeds};
    emitted_.push_back(action);
    return action;
  }
  return std::nullopt;
}

ContextDb make_context_db(const GatewayConfig& config) {
  std::map<int, double> thres;
  for (int i = 0; i < config.n_features; ++i) thres[i] = config.default_threshold;
  return ContextDb(std::move(thres));
}

void append_actions_csv(std::ostream& out, const std::vector<ActionValue>& actions,
                        std::uint64_t run_seed) {
  char buf[128];
  for (const ActionValue& a : actions) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%d,%llu\n", a.feature_id,
                  a.data_value, a.thres_value, a.exceeds ? 1 : 0,
                  static_cast<unsigned long long>(run_seed));
    out << buf;
  }
}

}  // namespace flowsim
