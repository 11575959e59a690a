#pragma once

#include "strelcast/gibbs.hpp"

#include <filesystem>

namespace strelcast::model {

/**
 * Draw archive layout:
 *   model.json        variant, frequencies, training time range, acceptance rates
 *   params.csv        draw,beta0,xi,rho,tau2,sigma2,n_clusters
 *   betas/<m>.csv     cluster,b0,...,b{2K-1}
 *   assignments.csv   draw,location_id,cluster
 *   w_last.csv        draw,location_id,value
 *   w/<m>.csv         full latent field in trace CSV form (only when `write_w`)
 * Numbers are written in shortest round-trip form, so save/load is lossless.
 */
void save_fit(const FitResult& fit, const std::filesystem::path& dir, bool write_w = false);

/// Throws DataError on missing or inconsistent files.
FitResult load_fit(const std::filesystem::path& dir);

}  // namespace strelcast::model
