#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "flowsim/topology.hpp"

namespace flowsim {

struct FeatureRecord {
  int feature_id = 0;
  double data_value = 0.0;
  NodeId source_sink = 0;
};

struct FeatureFilter {
  std::set<int> accepted;
};

/// Order-preserving subsequence of records whose feature_id is accepted.
std::vector<FeatureRecord> filter_features(const FeatureFilter& filter,
                                           const std::vector<FeatureRecord>& batch);

struct ActionValue {
  int feature_id = 0;
  double data_value = 0.0;
  double thres_value = 0.0;
  bool exceeds = false;
};

// Threshold context database. Stores only values that changed since the last
// stored value for the feature, and emits an action value whenever the new
// value exceeds its threshold or the exceedance state flips.
class ContextDb {
 public:
  explicit ContextDb(std::map<int, double> thres_values)
      : thres_(std::move(thres_values)) {}

  std::optional<ActionValue> update(const FeatureRecord& rec);

  const std::map<int, double>& thresholds() const { return thres_; }
  const std::map<int, double>& stored() const { return stored_; }
  const std::vector<ActionValue>& emitted() const { return emitted_; }

 private:
  std::map<int, double> thres_;
  std::map<int, double> stored_;
  std::vector<ActionValue> emitted_;
};

struct GatewayConfig {
  int n_features = 4;
  double default_threshold = 0.5;  // synthetic readings live on [0, 1]
};

ContextDb make_context_db(const GatewayConfig& config);

/// Append action values as CSV rows:
/// feature_id,data_value,thres_value,exceeds,run_seed
void append_actions_csv(std::ostream& out, const std::vector<ActionValue>& actions,
                        std::uint64_t run_seed);

}  // namespace flowsim
