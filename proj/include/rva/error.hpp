#pragma once

#include <stdexcept>
#include <string>

namespace rva {

enum class errc {
    invalid_topology,
    invalid_scenario,
    illegal_event,
    protocol_fault,
    engine_fault,
    unsupported_operation,
    oracle_too_large,
    inapplicable_policy,
    parse_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_topology: return "invalid-topology";
        case errc::invalid_scenario: return "invalid-scenario";
        case errc::illegal_event: return "illegal-event";
        case errc::protocol_fault: return "protocol-fault";
        case errc::engine_fault: return "engine-fault";
        case errc::unsupported_operation: return "unsupported-operation";
        case errc::oracle_too_large: return "oracle-too-large";
        case errc::inapplicable_policy: return "inapplicable-policy";
        case errc::parse_error: return "parse-error";
    }
    return "unknown";
}

struct error : std::runtime_error {
    errc code;
    error(errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code(c) {}
};

}  // namespace rva
