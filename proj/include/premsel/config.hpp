#pragma once

#include <premsel/expr.hpp>

#include <map>
#include <string>
#include <vector>

namespace premsel {

/// Flat `key = value` configuration. `#` starts a comment line; keys and
/// values are trimmed; a later duplicate key overrides an earlier one.
inline std::map<std::string, std::string> parse_flat_config(std::vector<std::string> const& lines)
{
	auto trim = [](std::string s) {
		auto b = s.find_first_not_of(" \t\r");
		if(b == std::string::npos)
			return std::string();
		auto e = s.find_last_not_of(" \t\r");
		return s.substr(b, e - b + 1);
	};
	std::map<std::string, std::string> out;
	for(std::size_t i = 0; i < lines.size(); ++i) {
		auto l = trim(lines[i]);
		if(l.empty() || l[0] == '#')
			continue;
		auto eq = l.find('=');
		if(eq == std::string::npos)
			throw Error("config line " + std::to_string(i + 1) + ": expected 'key = value'");
		auto key = trim(l.substr(0, eq));
		if(key.empty())
			throw Error("config line " + std::to_string(i + 1) + ": empty key");
		out[key] = trim(l.substr(eq + 1));
	}
	return out;
}

} // namespace premsel
