#pragma once

// Umbrella header.

#include "meshprov/config.hpp"
#include "meshprov/csv.hpp"
#include "meshprov/error.hpp"
#include "meshprov/harvester.hpp"
#include "meshprov/hierarchy.hpp"
#include "meshprov/log.hpp"
#include "meshprov/mesh_xml.hpp"
#include "meshprov/mesh_xml_writer.hpp"
#include "meshprov/model.hpp"
#include "meshprov/notes.hpp"
#include "meshprov/pipeline.hpp"
#include "meshprov/provenance.hpp"
#include "meshprov/report.hpp"
#include "meshprov/similarity.hpp"
#include "meshprov/text.hpp"
#include "meshprov/version_cache.hpp"
