#pragma once

#include "fedosov/geodesic.hpp"
#include "fedosov/presentation_io.hpp"

#include <vector>

namespace fedosov {

/// One named identity check with its registry tag and an exact residual
/// ("0" on pass, a witness otherwise).
struct CheckOutcome {
    std::string name;
    std::string tag;
    bool pass = true;
    std::string residual = "0";
};

/// Fixed tag registry; every emitted check carries one of these.
const std::vector<std::string>& check_tag_registry();

struct VerifyOptions {
    int order = 4;
    int splitting = 1;  // homotopy used by the intertwiner solve
    unsigned seed = 20240817;
    std::vector<Rational> base_point;  // geodesic chart point; defaults to zero
};

std::vector<CheckOutcome> checks_validate(const LiePairPresentation& p);
std::vector<CheckOutcome> checks_fedosov(const LiePairPresentation& p, const VerifyOptions& o);
std::vector<CheckOutcome> checks_pbw(const LiePairPresentation& p, const VerifyOptions& o);
std::vector<CheckOutcome> checks_phi(const LiePairPresentation& p, const VerifyOptions& o);
std::vector<CheckOutcome> checks_log(const LiePairPresentation& p, const VerifyOptions& o);
std::vector<CheckOutcome> checks_operator_calculus(const LiePairPresentation& p,
                                                   const VerifyOptions& o);
/// Chart tangent pairs only.
std::vector<CheckOutcome> checks_geodesic(const LiePairPresentation& p,
                                          const VerifyOptions& o);
/// Every applicable suite.
std::vector<CheckOutcome> checks_all(const LiePairPresentation& p, const VerifyOptions& o);

bool all_pass(const std::vector<CheckOutcome>& checks);

/// Deterministic digest of the run inputs for report payloads.
std::string inputs_digest(const Json& presentation, const std::string& command,
                          const VerifyOptions& o);

Json report_payload(const std::string& command, const LiePairPresentation& p,
                    const VerifyOptions& o, const std::vector<CheckOutcome>& checks);

} // namespace fedosov
