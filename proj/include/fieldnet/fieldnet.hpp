#pragma once

#include "fieldnet/backbone.hpp"
#include "fieldnet/centrality.hpp"
#include "fieldnet/community.hpp"
#include "fieldnet/csv.hpp"
#include "fieldnet/error.hpp"
#include "fieldnet/export.hpp"
#include "fieldnet/graph.hpp"
#include "fieldnet/ingest.hpp"
#include "fieldnet/report.hpp"
