#ifndef EDGEAVAIL_MODEL_FORMAT_HPP
#define EDGEAVAIL_MODEL_FORMAT_HPP

#include "edgeavail/san.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace edgeavail {

/// Reads a `.san` document (header line `san-format 1`).
///
///     san-format 1
///     description "two-state component"
///     param lambda = 0.1
///     param mu = "9 * lambda"          # folded at load
///     place Up = 1
///     place Down = 0
///     activity timed fail rate "lambda" {
///       input "#Up >= 1" { Up -= 1 }
///       case 1 { Down += 1 }
///     }
///     activity instant retry { ... }
///     reward up = "#Up >= 1"
///
/// Parameters are constant-folded in declaration order and may only use
/// earlier parameters. Everything else may reference any declaration.
/// Throws SyntaxError or SemanticError; the result always passes validate().
SanModel parse_model(std::string_view document);

SanModel load_model(const std::filesystem::path& path);

/// Canonical text such that parse_model(serialize_model(m)) == m.
std::string serialize_model(const SanModel& model);

} // namespace edgeavail

#endif // EDGEAVAIL_MODEL_FORMAT_HPP
