import logging

from flask import Flask


def create_app(config_object=None):
    app = Flask(__name__)

    if config_object is None:
        from config import Config
        config_object = Config
    app.config.from_object(config_object)

    logging.basicConfig(
        level=app.config['TORUS_LOG_LEVEL'],
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )

    from app.routes.routes import main_bp
    app.register_blueprint(main_bp)

    from app.routes.commands import register_commands
    register_commands(app)

    return app
