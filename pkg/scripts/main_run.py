import os

import minkPostPack as mpp


def main():

    # everything lands next to the repo root, 'plots' for the charts and
    # 'runs' for corpora and hypotheses
    root_path = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
    plots_path = os.path.join(root_path, 'plots')
    runs_path = os.path.join(root_path, 'runs')
    os.makedirs(runs_path, exist_ok=True)

    mpp.configure_logging(verbosity=1)


    ## CORRESPONDENCE CURVES
    # ----------------------------------------------------------------
    orders = [2, 4, 6]
    table = mpp.correspondence_table(orders, grid_points=101)
    print(mpp.correspondence_table(orders, grid_points=11).round(6))
    mpp.plot_correspondence(table, orders, save_path=plots_path, filename='plt1-correspondence.svg')

    # odd orders give complex roots, not probabilities
    for order in (3, 5):
        analysis = mpp.analyze_odd_order(0.5, order)
        print(f"order {order}, mu=0.5: roots {analysis.roots}, "
              f"valid probability root: {analysis.has_valid_probability_root}")


    ## HMM
    # ----------------------------------------------------------------
    # 3 words, sticky self loops; the non-uniform transitions are what lets
    # the orders decode differently
    labels = ['yes', 'no', 'maybe']
    initial = [0.5, 0.3, 0.2]
    transitions = [[0.80, 0.15, 0.05],
                   [0.10, 0.80, 0.10],
                   [0.05, 0.15, 0.80]]
    hmm = mpp.HmmModel.from_probabilities(initial, transitions, labels, state_to_class=[0, 1, 2])
    hmm_path = os.path.join(runs_path, 'hmm.json')
    mpp.save_hmm(hmm, hmm_path)


    ## EXPERIMENT
    # ----------------------------------------------------------------
    # a clean split with sharp posteriors and an 'other' split with many weak ones
    config = mpp.ExperimentConfig(
        hmm='hmm.json',
        splits=(
            mpp.SplitConfig('clean', noise=mpp.NoiseSpec(concentration=20.0, confusion_rate=0.1, seed=1)),
            mpp.SplitConfig('other', noise=mpp.NoiseSpec(concentration=3.0, confusion_rate=0.3, seed=2)),
        ),
        num_utterances=50,
        frames_per_utterance=(20, 40),
        base_dir=runs_path,
    )
    report = mpp.run_experiment(config, runs_path)
    print(report.to_table(include_timing=True))


if __name__ == "__main__":
    main()
    print("Main terminated! Look for the chart in the 'plots' directory.")
