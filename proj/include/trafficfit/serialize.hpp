#pragma once

// JSON shapes of the report types. Field names are part of the external
// interface and must stay stable (schema/report.schema.json).

#include <json.hpp>

#include "trafficfit/billing.hpp"
#include "trafficfit/corrgof.hpp"
#include "trafficfit/distributions.hpp"
#include "trafficfit/fitcompare.hpp"
#include "trafficfit/ingest.hpp"
#include "trafficfit/provisioning.hpp"
#include "trafficfit/stationarity.hpp"

namespace trafficfit {

using Json = nlohmann::ordered_json;

Json to_json(const DistFit& fit);
DistFit dist_fit_from_json(const Json& j);

Json to_json(const GofResult& r);
Json to_json(const ComparisonResult& r);
Json to_json(const AdjudicationSummary& s);
Json to_json(const GammaResult& r);
Json to_json(const GammaVariation& v);
Json to_json(const UnitRootTestResult& r);
Json to_json(const StationarityReport& r);
Json to_json(const ProvisioningResult& r);
Json to_json(const AnomalyScreen& s);
Json to_json(const BillingPrediction& p);
Json nrmse_table_json(const std::map<Family, double>& nrmse);

}  // namespace trafficfit
