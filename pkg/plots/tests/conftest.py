import matplotlib

matplotlib.use("Agg")  # tests render headless
