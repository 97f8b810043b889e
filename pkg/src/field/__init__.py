"""Grid evaluation of the descriptor field and post-processing of the resulting rasters"""
