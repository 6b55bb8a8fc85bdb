"""
Services package
Domain logic: data, fusion, decoding, losses, metrics, training, ensembles, experiments
"""
