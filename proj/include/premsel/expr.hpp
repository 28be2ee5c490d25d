#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace premsel {

// Base class of every error the library throws.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Syntax error in an s-expression or statement line. `offset` is the byte
// offset into the parsed text.
class ParseError : public Error {
public:
	ParseError(std::string const& what, std::size_t offset)
		: Error(what + " at offset " + std::to_string(offset))
		, offset_(offset)
	{}

	std::size_t offset() const noexcept { return offset_; }

private:
	std::size_t offset_;
};

/// A syntax tree of constant names: `head` applied to `args`.
struct Expr {
	std::string head;
	std::vector<Expr> args;

	Expr() = default;
	explicit Expr(std::string h, std::vector<Expr> a = {})
		: head(std::move(h))
		, args(std::move(a))
	{}

	bool is_leaf() const noexcept { return args.empty(); }

	friend bool operator==(Expr const&, Expr const&) = default;
};

struct Statement {
	std::string name;
	std::vector<Expr> hypotheses;
	Expr conclusion;

	friend bool operator==(Statement const&, Statement const&) = default;
};

// True for names usable as an Expr head: non-empty, no whitespace, no
// parentheses, no `/`.
inline bool valid_name(std::string_view name) noexcept
{
	if(name.empty())
		return false;
	for(char c : name) {
		switch(c) {
		case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
		case '(': case ')': case '/':
			return false;
		default:
			break;
		}
	}
	return true;
}

namespace detail {

inline bool is_space(char c) noexcept
{
	return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

class SexpReader {
public:
	explicit SexpReader(std::string_view text)
		: text_(text)
	{}

	void skip_space()
	{
		while(pos_ < text_.size() && is_space(text_[pos_]))
			++pos_;
	}

	bool at_end()
	{
		skip_space();
		return pos_ >= text_.size();
	}

	std::size_t pos() const noexcept { return pos_; }

	std::string_view read_atom()
	{
		skip_space();
		std::size_t const start = pos_;
		while(pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')')
			++pos_;
		return text_.substr(start, pos_ - start);
	}

	Expr read_expr()
	{
		skip_space();
		if(pos_ >= text_.size())
			throw ParseError("unexpected end of input, expected expression", pos_);
		if(text_[pos_] == ')')
			throw ParseError("unbalanced ')'", pos_);
		if(text_[pos_] != '(') {
			std::size_t const at = pos_;
			return Expr(checked_name(read_atom(), at));
		}

		std::size_t const open = pos_++;
		skip_space();
		if(pos_ >= text_.size())
			throw ParseError("unclosed '('", open);
		if(text_[pos_] == '(' || text_[pos_] == ')')
			throw ParseError("empty head", pos_);
		std::size_t const head_pos = pos_;
		Expr e(checked_name(read_atom(), head_pos));
		for(;;) {
			skip_space();
			if(pos_ >= text_.size())
				throw ParseError("unclosed '('", open);
			if(text_[pos_] == ')') {
				++pos_;
				return e;
			}
			e.args.push_back(read_expr());
		}
	}

private:
	static std::string checked_name(std::string_view atom, std::size_t at)
	{
		if(atom.empty())
			throw ParseError("empty name", at);
		if(atom.find('/') != std::string_view::npos)
			throw ParseError("'/' is reserved in names (escape as _SLASH_)", at);
		return std::string(atom);
	}

	std::string_view text_;
	std::size_t pos_ = 0;
};

inline void print_to(std::string& out, Expr const& e)
{
	if(e.is_leaf()) {
		out += e.head;
		return;
	}
	out += '(';
	out += e.head;
	for(auto const& a : e.args) {
		out += ' ';
		print_to(out, a);
	}
	out += ')';
}

} // namespace detail

/// Parses `name` or `(name child ...)`. The whole input must be consumed.
inline Expr parse_expr(std::string_view text)
{
	detail::SexpReader r(text);
	Expr e = r.read_expr();
	if(!r.at_end())
		throw ParseError("trailing input after expression", r.pos());
	return e;
}

inline std::string to_string(Expr const& e)
{
	std::string out;
	detail::print_to(out, e);
	return out;
}

/// Parses `THM <name> CONCL <sexp> HYP <sexp> ...`. Keywords are
/// case-sensitive and HYP may appear any number of times.
inline Statement parse_statement(std::string_view line)
{
	detail::SexpReader r(line);
	Statement s;

	auto expect_keyword = [&](std::string_view kw) {
		r.skip_space();
		std::size_t const at = r.pos();
		if(r.read_atom() != kw)
			throw ParseError("expected " + std::string(kw), at);
	};

	expect_keyword("THM");
	r.skip_space();
	std::size_t const name_pos = r.pos();
	auto name = r.read_atom();
	if(name.empty())
		throw ParseError("missing theorem name", name_pos);
	s.name = std::string(name);

	expect_keyword("CONCL");
	s.conclusion = r.read_expr();

	while(!r.at_end()) {
		expect_keyword("HYP");
		s.hypotheses.push_back(r.read_expr());
	}
	return s;
}

inline std::string to_string(Statement const& s)
{
	std::string out = "THM " + s.name + " CONCL ";
	detail::print_to(out, s.conclusion);
	for(auto const& h : s.hypotheses) {
		out += " HYP ";
		detail::print_to(out, h);
	}
	return out;
}

// A statement parse failure tagged with its 1-based line number.
class StatementFileError : public Error {
public:
	StatementFileError(std::size_t line, ParseError const& cause)
		: Error("line " + std::to_string(line) + ": " + cause.what())
		, line_(line)
	{}

	std::size_t line() const noexcept { return line_; }

private:
	std::size_t line_;
};

/// Parses a statement file body. Blank lines and lines whose first
/// non-space character is `#` are skipped.
inline std::vector<Statement> parse_statements(std::vector<std::string> const& lines)
{
	std::vector<Statement> out;
	for(std::size_t i = 0; i < lines.size(); ++i) {
		std::string_view l = lines[i];
		auto first = l.find_first_not_of(" \t\r");
		if(first == std::string_view::npos || l[first] == '#')
			continue;
		try {
			out.push_back(parse_statement(l));
		} catch(ParseError const& e) {
			throw StatementFileError(i + 1, e);
		}
	}
	return out;
}

} // namespace premsel
