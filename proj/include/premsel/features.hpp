#pragma once

#include <premsel/expr.hpp>
#include <premsel/string_set.hpp>

#include <algorithm>
#include <functional>
#include <iterator>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace premsel {

enum class Tag : char { hypothesis = 'H', conclusion = 'T' };

/// Feature strings `<tag>:<g1>[/<g2>[/<g3>]]` of one statement.
using FeatureSet = StringSet<struct FeatureSetTag>;

struct FeatureConfig {
	bool use_names = true;
	bool use_bigrams = false;
	bool use_trigrams = false;

	bool valid() const noexcept { return use_names || use_bigrams || use_trigrams; }

	// Every class enabled here is also enabled in `other`.
	bool subset_of(FeatureConfig const& other) const noexcept
	{
		return (!use_names || other.use_names) && (!use_bigrams || other.use_bigrams)
			&& (!use_trigrams || other.use_trigrams);
	}

	static FeatureConfig names() { return {true, false, false}; }
	static FeatureConfig names_bigrams() { return {true, true, false}; }
	static FeatureConfig all() { return {true, true, true}; }

	friend bool operator==(FeatureConfig const&, FeatureConfig const&) = default;
};

/// `n`, `n+b`, `n+b+t`, or any other `+`-joined combination of n/b/t.
inline std::string to_string(FeatureConfig const& cfg)
{
	std::string out;
	auto add = [&](char c) {
		if(!out.empty())
			out += '+';
		out += c;
	};
	if(cfg.use_names) add('n');
	if(cfg.use_bigrams) add('b');
	if(cfg.use_trigrams) add('t');
	return out;
}

inline FeatureConfig parse_feature_config(std::string_view text)
{
	FeatureConfig cfg{false, false, false};
	std::size_t pos = 0;
	while(pos <= text.size()) {
		auto next = text.find('+', pos);
		auto part = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
		if(part == "n" || part == "names")
			cfg.use_names = true;
		else if(part == "b" || part == "bigrams")
			cfg.use_bigrams = true;
		else if(part == "t" || part == "trigrams")
			cfg.use_trigrams = true;
		else
			throw Error("unknown feature class '" + std::string(part) + "' in '" + std::string(text) + "'");
		if(next == std::string_view::npos)
			break;
		pos = next + 1;
	}
	return cfg;
}

namespace detail {

inline std::string tagged(Tag tag, std::string_view body)
{
	std::string s;
	s.reserve(body.size() + 2);
	s += static_cast<char>(tag);
	s += ':';
	s += body;
	return s;
}

template<typename F>
void for_each_node(Expr const& e, F&& f)
{
	f(e);
	for(auto const& a : e.args)
		for_each_node(a, f);
}

} // namespace detail

inline FeatureSet extract_names(Expr const& e, Tag tag)
{
	std::vector<std::string> out;
	detail::for_each_node(e, [&](Expr const& n) { out.push_back(detail::tagged(tag, n.head)); });
	return FeatureSet(std::move(out));
}

// Head symbol paired with each argument's head.
inline FeatureSet extract_bigrams(Expr const& e, Tag tag)
{
	std::vector<std::string> out;
	detail::for_each_node(e, [&](Expr const& n) {
		for(auto const& c : n.args)
			out.push_back(detail::tagged(tag, n.head + '/' + c.head));
	});
	return FeatureSet(std::move(out));
}

// Every parent/child/grandchild path.
inline FeatureSet extract_trigrams(Expr const& e, Tag tag)
{
	std::vector<std::string> out;
	detail::for_each_node(e, [&](Expr const& n) {
		for(auto const& c : n.args)
			for(auto const& g : c.args)
				out.push_back(detail::tagged(tag, n.head + '/' + c.head + '/' + g.head));
	});
	return FeatureSet(std::move(out));
}

inline FeatureSet featurize(Statement const& s, FeatureConfig const& cfg)
{
	FeatureSet out;
	auto add = [&](Expr const& e, Tag tag) {
		if(cfg.use_names) out.merge(extract_names(e, tag));
		if(cfg.use_bigrams) out.merge(extract_bigrams(e, tag));
		if(cfg.use_trigrams) out.merge(extract_trigrams(e, tag));
	};
	add(s.conclusion, Tag::conclusion);
	for(auto const& h : s.hypotheses)
		add(h, Tag::hypothesis);
	return out;
}

/// Number of `/`-separated name components in a feature string (1-3), or 0
/// when the string is not a well-formed feature.
inline int feature_arity(std::string_view f) noexcept
{
	if(f.size() < 3 || (f[0] != 'H' && f[0] != 'T') || f[1] != ':')
		return 0;
	auto body = f.substr(2);
	int parts = 1;
	std::size_t start = 0;
	for(std::size_t i = 0; i <= body.size(); ++i) {
		if(i == body.size() || body[i] == '/') {
			if(i == start)
				return 0;
			if(i < body.size())
				++parts;
			start = i + 1;
		}
	}
	return parts <= 3 ? parts : 0;
}

// Marks the classes of the features in `fs` as enabled in `cfg`.
inline void note_feature_classes(FeatureConfig& cfg, FeatureSet const& fs) noexcept
{
	for(auto const& f : fs) {
		switch(feature_arity(f)) {
		case 1: cfg.use_names = true; break;
		case 2: cfg.use_bigrams = true; break;
		case 3: cfg.use_trigrams = true; break;
		default: break;
		}
	}
}

/// The feature classes present in a range of feature sets.
template<typename Range>
FeatureConfig infer_feature_config(Range const& sets)
{
	FeatureConfig cfg{false, false, false};
	for(FeatureSet const& fs : sets)
		note_feature_classes(cfg, fs);
	return cfg;
}

} // namespace premsel
