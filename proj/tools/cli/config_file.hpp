#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace nseg::cli {

using KeyValues = std::map<std::string, std::string>;

/// Parses the TOML-style experiment file into flat flag-named keys.
///
///   # top-level keys use the long flag names
///   mode = "label"
///   p = 0.5
///   seed = 42
///
///   [omega]                 # Cartesian product, becomes key "omega"
///   alpha = [1, 15, 30, 50, 100]
///   sigma = [3, 5, 10]      # or: product = "1,15,30,50,100x3,5,10"
///
///   [classes]               # becomes keys "remap" and "classes"
///   remap = "0,1,2,3,4,ignore"
///
/// Sections named after a subcommand ([augment], [tile], ...) hold ordinary
/// keys. Throws std::runtime_error with the file and line on syntax errors.
KeyValues parse_config(std::string_view text, std::string_view origin = "<config>");
KeyValues read_config_file(const std::filesystem::path& path);

}  // namespace nseg::cli
