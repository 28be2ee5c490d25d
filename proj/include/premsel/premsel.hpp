#pragma once

#include <premsel/config.hpp>
#include <premsel/dataset.hpp>
#include <premsel/eval.hpp>
#include <premsel/expr.hpp>
#include <premsel/features.hpp>
#include <premsel/forest.hpp>
#include <premsel/io.hpp>
#include <premsel/knn.hpp>
#include <premsel/model_file.hpp>
#include <premsel/ranking.hpp>
#include <premsel/service.hpp>
#include <premsel/string_set.hpp>
