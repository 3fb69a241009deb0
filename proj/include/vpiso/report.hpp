#pragma once

#include <json.hpp>

#include "vpiso/decide.hpp"

namespace vpiso {

using Json = nlohmann::ordered_json;

/// Integers that fit in 64 bits become JSON numbers, larger ones strings.
Json integer_json(const Integer& z);

Json to_json(const AbelianInvariants& inv);
Json to_json(const QuotientInvariants& q);
Json to_json(const Fingerprint& f);
Json to_json(const Word& w);
Json to_json(const IntMatrix& m);
Json to_json(const ThetaSpec& t);
Json to_json(const PrimeVerdict& v, const DiophantineSystem& system);
Json to_json(const LocalSolvabilityReport& r, const DiophantineSystem& system);
Json to_json(const NegativeCertificate& c);
Json to_json(const Verdict& v, const DecideConfig& cfg);
Json instance_summary(const InstancePair& inst);

}  // namespace vpiso
