#pragma once

#include "aggregation.hpp"
#include "cli.hpp"
#include "engine.hpp"
#include "model.hpp"
#include "parser.hpp"
