#pragma once

#include <premsel/expr.hpp>

#include <zlib.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace premsel {

class IoError : public Error {
public:
	using Error::Error;
};

inline bool has_gz_suffix(std::string_view path) noexcept
{
	return path.size() >= 3 && path.substr(path.size() - 3) == ".gz";
}

/// Reads all lines of a text file, transparently inflating gzip input.
/// Trailing `\r` is stripped; a final newline does not produce an empty line.
inline std::vector<std::string> read_lines(std::string const& path)
{
	gzFile f = gzopen(path.c_str(), "rb");
	if(!f)
		throw IoError("cannot open '" + path + "': " + std::strerror(errno));

	std::vector<std::string> lines;
	std::string cur;
	char buf[1 << 16];
	for(;;) {
		int n = gzread(f, buf, sizeof buf);
		if(n < 0) {
			int code = 0;
			std::string msg = gzerror(f, &code);
			gzclose(f);
			throw IoError("read error in '" + path + "': " + msg);
		}
		if(n == 0)
			break;
		for(int i = 0; i < n; ++i) {
			if(buf[i] == '\n') {
				if(!cur.empty() && cur.back() == '\r')
					cur.pop_back();
				lines.push_back(std::move(cur));
				cur.clear();
			} else {
				cur += buf[i];
			}
		}
	}
	gzclose(f);
	if(!cur.empty()) {
		if(cur.back() == '\r')
			cur.pop_back();
		lines.push_back(std::move(cur));
	}
	return lines;
}

inline std::string read_file(std::string const& path)
{
	std::string out;
	for(auto const& l : read_lines(path)) {
		out += l;
		out += '\n';
	}
	return out;
}

/// Writes `content` verbatim, gzip-compressed when the path ends in `.gz`.
inline void write_file(std::string const& path, std::string_view content)
{
	if(has_gz_suffix(path)) {
		// Fixed level and no header timestamp (gzopen writes mtime 0), so
		// identical content gives identical bytes.
		gzFile f = gzopen(path.c_str(), "wb6");
		if(!f)
			throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
		if(!content.empty() && gzwrite(f, content.data(), static_cast<unsigned>(content.size())) == 0) {
			gzclose(f);
			throw IoError("write error in '" + path + "'");
		}
		if(gzclose(f) != Z_OK)
			throw IoError("write error in '" + path + "'");
		return;
	}
	std::FILE* f = std::fopen(path.c_str(), "wb");
	if(!f)
		throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
	bool ok = std::fwrite(content.data(), 1, content.size(), f) == content.size();
	ok = (std::fclose(f) == 0) && ok;
	if(!ok)
		throw IoError("write error in '" + path + "'");
}

inline void write_lines(std::string const& path, std::vector<std::string> const& lines)
{
	std::string content;
	for(auto const& l : lines) {
		content += l;
		content += '\n';
	}
	write_file(path, content);
}

/// Splits on runs of ASCII whitespace.
inline std::vector<std::string> split_ws(std::string_view s)
{
	std::vector<std::string> out;
	std::size_t i = 0;
	while(i < s.size()) {
		while(i < s.size() && detail::is_space(s[i]))
			++i;
		std::size_t const start = i;
		while(i < s.size() && !detail::is_space(s[i]))
			++i;
		if(i > start)
			out.emplace_back(s.substr(start, i - start));
	}
	return out;
}

} // namespace premsel
