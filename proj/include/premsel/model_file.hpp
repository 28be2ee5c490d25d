#pragma once

#include <premsel/forest.hpp>
#include <premsel/io.hpp>
#include <premsel/knn.hpp>

#include <optional>
#include <string>

namespace premsel {

// Exactly one member is set.
struct LoadedModel {
	std::optional<Forest> forest;
	std::optional<KnnRanker> knn;
};

inline void save_model(std::string const& path, Forest const& f)
{
	write_file(path, serialize(f));
}

inline void save_model(std::string const& path, KnnRanker const& k)
{
	write_file(path, serialize(k));
}

/// Loads a forest or k-NN model file, dispatching on its first line.
inline LoadedModel load_model(std::string const& path)
{
	auto lines = read_lines(path);
	LoadedModel m;
	auto starts = [&](std::string_view magic) {
		return !lines.empty() && lines[0].compare(0, magic.size(), magic) == 0;
	};
	try {
		if(starts(forest_magic))
			m.forest = deserialize_forest(lines);
		else if(starts(knn_magic))
			m.knn = deserialize_knn(lines);
		else
			throw LoadError(path, 1, "unrecognized model file");
	} catch(LoadError const& e) {
		throw LoadError(path, e.line(), e.what());
	}
	return m;
}

} // namespace premsel
