#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace premsel {

struct ScoredPremise {
	std::string premise;
	double score = 0.0;

	friend bool operator==(ScoredPremise const&, ScoredPremise const&) = default;
};

// Sorted by descending score, ties by ascending premise name; no duplicates.
using Ranking = std::vector<ScoredPremise>;

inline bool ranks_before(ScoredPremise const& a, ScoredPremise const& b) noexcept
{
	if(a.score != b.score)
		return a.score > b.score;
	return a.premise < b.premise;
}

/// Builds a Ranking from (premise, score) pairs with unique premises.
template<typename Scores>
Ranking make_ranking(Scores const& scores)
{
	Ranking r;
	r.reserve(scores.size());
	for(auto const& [premise, score] : scores)
		r.push_back({std::string(premise), static_cast<double>(score)});
	std::sort(r.begin(), r.end(), ranks_before);
	return r;
}

inline bool is_well_formed(Ranking const& r)
{
	for(std::size_t i = 1; i < r.size(); ++i)
		if(!ranks_before(r[i - 1], r[i]))
			return false;
	return true;
}

inline void truncate(Ranking& r, std::size_t n)
{
	if(r.size() > n)
		r.resize(n);
}

} // namespace premsel
