#pragma once

#include "denseset/conformal.hpp"
#include "denseset/datagen.hpp"
#include "denseset/dense_ball.hpp"
#include "denseset/dense_ball_isotropic.hpp"
#include "denseset/dense_ellipsoid.hpp"
#include "denseset/error.hpp"
#include "denseset/geometry.hpp"
#include "denseset/greedy_union.hpp"
#include "denseset/linalg.hpp"
#include "denseset/oracle.hpp"
#include "denseset/point_set.hpp"
#include "denseset/robust_mean.hpp"
#include "denseset/spectral.hpp"
