#pragma once

#include <string>
#include <string_view>

#include "balance/core_model.hpp"

namespace balance {

// One combat log per line, as a JSON object. Field order is irrelevant on
// input and unknown fields are rejected. Errors:
//   MalformedRecord    - not parseable as a single JSON value
//   SchemaViolation    - missing, unknown, or ill-typed field
//   InvariantViolation - well-typed but violates a domain invariant
// The error's field() carries the JSON path, e.g. "players[1].dps".
CombatLog parse_log_line(std::string_view line);

// Canonical form: keys sorted, no whitespace, shortest round-trip numbers,
// null for a missing specialization. serialize(parse(x)) is a fixed point.
std::string serialize_log(const CombatLog& log);

// Era labels and encounter ids double as path components in the store.
bool is_safe_identifier(std::string_view id) noexcept;

}  // namespace balance
