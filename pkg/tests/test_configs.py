import unittest
import glob
import os
import utils

from mvqa_core.config.paths_catalog import DemoCatalog, EndpointCatalog


class TestConfigs(unittest.TestCase):
    def test_configs_load(self):
        ''' Make sure configs are loadable '''

        cfg_root_path = utils.get_config_root_path()
        files = glob.glob(os.path.join(cfg_root_path, "*.yaml"))
        self.assertGreater(len(files), 0)

        for fn in files:
            print('Loading {}...'.format(fn))
            utils.load_config_from_file(fn)

    def test_bundled_splits_exist(self):
        for name in DemoCatalog.SPLITS:
            paths = DemoCatalog.get(name)
            self.assertTrue(os.path.isfile(paths["assets"]))
            self.assertTrue(os.path.isdir(paths["themes"]))
            self.assertTrue(os.path.isdir(paths["templates"]))
            self.assertTrue(os.path.isfile(paths["targets"]))

    def test_split_selection(self):
        cfg = utils.load_config("full_split.yaml")
        paths = DemoCatalog.resolve(cfg, cfg.PATHS.SPLIT)
        self.assertTrue(paths["targets"].endswith("full_split.json"))
        cfg = utils.load_config("train_split.yaml")
        self.assertEqual(cfg.SCENE.SPLIT, "train")
        paths = DemoCatalog.resolve(cfg, cfg.PATHS.SPLIT)
        self.assertTrue(paths["targets"].endswith("train_split.json"))

    def test_unknown_split(self):
        with self.assertRaises(RuntimeError):
            DemoCatalog.get("nope")

    def test_mock_fixtures_exist(self):
        for name, attrs in EndpointCatalog.ENDPOINTS.items():
            if attrs.get("provider") == "mock":
                self.assertTrue(os.path.isfile(EndpointCatalog.get(name)["fixture"]), name)


if __name__ == "__main__":
    unittest.main()
