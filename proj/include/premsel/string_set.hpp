#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

namespace premsel {

/// A sorted, duplicate-free set of strings. `Kind` only separates otherwise
/// identical set types (feature sets vs premise-name sets).
template<typename Kind>
class StringSet {
public:
	using const_iterator = std::vector<std::string>::const_iterator;

	StringSet() = default;

	explicit StringSet(std::vector<std::string> features)
		: items_(std::move(features))
	{
		normalize();
	}

	StringSet(std::initializer_list<std::string> features)
		: items_(features)
	{
		normalize();
	}

	bool contains(std::string_view f) const
	{
		return std::binary_search(items_.begin(), items_.end(), f, std::less<>{});
	}

	void insert(std::string f)
	{
		auto it = std::lower_bound(items_.begin(), items_.end(), f);
		if(it == items_.end() || *it != f)
			items_.insert(it, std::move(f));
	}

	void merge(StringSet const& other)
	{
		std::vector<std::string> out;
		out.reserve(items_.size() + other.items_.size());
		std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
			std::back_inserter(out));
		items_ = std::move(out);
	}

	bool includes(StringSet const& other) const
	{
		return std::includes(items_.begin(), items_.end(), other.items_.begin(), other.items_.end());
	}

	std::size_t size() const noexcept { return items_.size(); }
	bool empty() const noexcept { return items_.empty(); }
	const_iterator begin() const noexcept { return items_.begin(); }
	const_iterator end() const noexcept { return items_.end(); }
	std::vector<std::string> const& items() const noexcept { return items_; }

	friend bool operator==(StringSet const&, StringSet const&) = default;
	friend auto operator<=>(StringSet const& a, StringSet const& b) { return a.items_ <=> b.items_; }

private:
	void normalize()
	{
		std::sort(items_.begin(), items_.end());
		items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
	}

	std::vector<std::string> items_;
};

// Transparent hash so string-keyed maps accept string_view lookups.
struct StringHash {
	using is_transparent = void;
	std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// Names of premises (lemmas, theorems).
using NameSet = StringSet<struct NameSetTag>;

} // namespace premsel
